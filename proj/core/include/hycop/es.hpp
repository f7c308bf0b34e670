#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hycop/policy.hpp"

namespace hycop {

struct EsConfig {
    int population = 500;        // M antithetic pairs (2M evaluations per generation)
    double sigma = 0.02;         // perturbation scale
    double lr = 5e-3;            // eta
    double weight_decay = 1e-3;  // lambda, multiplicative
    int generations = 200;       // G
    int minibatch = 16;          // B queries per generation
    std::uint64_t seed = 42;
};

struct GenerationLog {
    int generation = 0;
    double mean_loss = 0.0;
    double min_loss = 0.0;
    double theta_norm = 0.0;
    double wall_seconds = 0.0;
    int diverged = 0;  // rollouts that hit the penalty cap this generation
};

/// The training problem seen by the ES loop.  rollout_loss evaluates one
/// query under a candidate theta and may throw or return non-finite on
/// divergence; constant_predictor_loss(i) = ||target_i - u0_i|| feeds the
/// 10x divergence penalty cap.
struct EsProblem {
    int num_samples = 0;
    std::function<double(const std::vector<double>& theta, int sample)> rollout_loss;
    std::function<double(int sample)> constant_predictor_loss;
};

/// Centered-rank fitness shaping: sort ascending by loss, weight =
/// 0.5 - rank/(len-1) (best loss -> +0.5), tied losses share their averaged
/// rank; weights sum to zero and are invariant under any strictly monotone
/// transform of the losses.
std::vector<double> rank_shape(const std::vector<double>& losses);

/// Algorithm-1-style ES with antithetic sampling and multiplicative weight
/// decay.  Per generation: draw a minibatch of B queries and M Gaussian
/// perturbations from generation-indexed streams of the master seed;
/// evaluate the 2M antithetic candidates (parallel, reduced in fixed particle
/// order); rank-shape; update theta <- (1-lambda)(theta + eta*g) with
/// g = 1/(2M sigma) * sum_i (w_i^+ - w_i^-) eps_i.  (With best-rank weight
/// +0.5, +eta*g is the descent direction of the loss.)  Diverged rollouts
/// score the capped penalty; an all-diverged generation logs a stall warning
/// and continues.
Policy es_train(const Policy& start, const EsProblem& problem, const EsConfig& cfg,
                std::vector<GenerationLog>* log = nullptr,
                const std::function<void(const GenerationLog&)>& on_generation = {});

}  // namespace hycop
