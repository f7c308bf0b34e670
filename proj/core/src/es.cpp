#include "hycop/es.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "hycop/errors.hpp"
#include "hycop/parallel.hpp"
#include "hycop/rng.hpp"

namespace hycop {

std::vector<double> rank_shape(const std::vector<double>& losses) {
    const size_t n = losses.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return losses[a] < losses[b]; });
    // Average ranks over ties so equal losses get equal weight.
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && losses[order[j + 1]] == losses[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j);
        for (size_t t = i; t <= j; ++t)
            w[order[t]] = 0.5 - avg_rank / static_cast<double>(n - 1);
        i = j + 1;
    }
    return w;
}

Policy es_train(const Policy& start, const EsProblem& problem, const EsConfig& cfg,
                std::vector<GenerationLog>* log,
                const std::function<void(const GenerationLog&)>& on_generation) {
    if (problem.num_samples <= 0) throw ConfigError("es_train: empty dataset");
    if (cfg.population < 1 || cfg.minibatch < 1 || cfg.sigma <= 0.0)
        throw ConfigError("es_train: bad population/minibatch/sigma");

    const int dim = static_cast<int>(start.theta.size());
    const int M = cfg.population;
    Policy policy = start;

    for (int gen = 0; gen < cfg.generations; ++gen) {
        const auto t0 = std::chrono::steady_clock::now();

        // Generation-indexed streams keep the run reproducible for any
        // worker count: the batch, the noise matrix, and the reduction order
        // are all fixed before evaluation starts.
        Rng batch_rng(cfg.seed, {0xba7c4ULL, static_cast<std::uint64_t>(gen)});
        std::vector<int> batch(cfg.minibatch);
        for (auto& b : batch) b = batch_rng.choice(problem.num_samples);

        double cap = 0.0;
        for (int b : batch) cap += problem.constant_predictor_loss(b);
        cap = 10.0 * cap / static_cast<double>(cfg.minibatch);
        if (!(cap > 0.0) || !std::isfinite(cap)) cap = 1e6;

        std::vector<double> eps(static_cast<size_t>(M) * dim);
        Rng noise_rng(cfg.seed, {0x4015eULL, static_cast<std::uint64_t>(gen)});
        for (auto& e : eps) e = noise_rng.normal();

        // 2M candidate losses; index 2i is theta + sigma*eps_i, 2i+1 the mirror.
        std::vector<double> losses(static_cast<size_t>(2) * M);
        std::vector<int> diverged(static_cast<size_t>(2) * M, 0);
        parallel_for(2 * M, [&](int idx) {
            const int i = idx / 2;
            const double sign = (idx % 2 == 0) ? 1.0 : -1.0;
            std::vector<double> cand(policy.theta);
            const double* e = eps.data() + static_cast<size_t>(i) * dim;
            for (int d = 0; d < dim; ++d) cand[d] += sign * cfg.sigma * e[d];
            double acc = 0.0;
            int bad = 0;
            for (int b : batch) {
                double l;
                try {
                    l = problem.rollout_loss(cand, b);
                } catch (const Error&) {
                    l = cap;
                    ++bad;
                }
                if (!std::isfinite(l) || l > cap) {
                    l = cap;
                    ++bad;
                }
                acc += l;
            }
            losses[idx] = acc / static_cast<double>(cfg.minibatch);
            diverged[idx] = bad;
        });

        const auto w = rank_shape(losses);

        // g = 1/(2M sigma) sum_i (w_i^+ - w_i^-) eps_i; with best-rank weight
        // +0.5 this points downhill, so the update adds eta*g.
        std::vector<double> grad(dim, 0.0);
        for (int i = 0; i < M; ++i) {
            const double dw = w[2 * i] - w[2 * i + 1];
            if (dw == 0.0) continue;
            const double* e = eps.data() + static_cast<size_t>(i) * dim;
            for (int d = 0; d < dim; ++d) grad[d] += dw * e[d];
        }
        const double scale = 1.0 / (2.0 * M * cfg.sigma);
        for (int d = 0; d < dim; ++d)
            policy.theta[d] = (1.0 - cfg.weight_decay) * (policy.theta[d] + cfg.lr * scale * grad[d]);

        GenerationLog gl;
        gl.generation = gen;
        gl.mean_loss = std::accumulate(losses.begin(), losses.end(), 0.0) / losses.size();
        gl.min_loss = *std::min_element(losses.begin(), losses.end());
        double tn = 0.0;
        for (double t : policy.theta) tn += t * t;
        gl.theta_norm = std::sqrt(tn);
        gl.diverged = std::accumulate(diverged.begin(), diverged.end(), 0);
        gl.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log) log->push_back(gl);
        if (on_generation) on_generation(gl);
    }
    return policy;
}

}  // namespace hycop
