#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hycop/features.hpp"
#include "hycop/systems.hpp"

namespace hycop {

/// Normalized: softplus durations of the first k steps are rescaled to sum
/// exactly to the query horizon T (the default allocation semantics).
/// Free: raw softplus durations, used by oracle tests and diagnostics.
enum class DurationMode { Normalized, Free };

struct PolicyArch {
    int input_dim = 4;   // m
    int hidden = 4;      // H, single tanh layer
    int dict_size = 2;   // n primitives
    int k_max = 18;
    int k_min = 3;
    DurationMode duration_mode = DurationMode::Normalized;
    FeatureMode feature_mode = FeatureMode::Dimensionless;

    int output_dim() const { return k_max * (dict_size + 1) + 1; }
    /// (m+1)H + (H+1)(K_max(n+1) + 1)
    int param_count() const {
        return (input_dim + 1) * hidden + (hidden + 1) * output_dim();
    }
};

struct ProgramStep {
    int primitive;  // dictionary index
    double tau;     // duration, >= 0
};

struct Program {
    std::vector<ProgramStep> steps;
    double total_duration() const {
        double s = 0.0;
        for (const auto& st : steps) s += st.tau;
        return s;
    }
};

/// theta layout: W1 (hidden x input, row-major), b1, W2 (output x hidden,
/// row-major), b2.  Output rows are ordered [step 0 logits.., step 0
/// duration, step 1 logits.., ...], with the program-length head last.
struct Policy {
    PolicyArch arch;
    std::vector<double> theta;
};

/// Zero biases, weights ~ U(-0.5, 0.5)/sqrt(fan_in), deterministic in seed.
Policy init_policy(const PolicyArch& arch, std::uint64_t seed);

/// Forward pass + program decoding.  Ties in the per-step argmax go to the
/// lowest dictionary index; program length k = round(k_min + (k_max - k_min)
/// * sigmoid(length head)), clamped.  Throws PolicyNumericalError on
/// non-finite network output and ParamShapeError on a bad theta length.
Program decode_program(const Policy& policy, const std::vector<double>& features, double T);

/// Architecture surgery for dictionary extension: new logit rows (weights and
/// bias) for the added primitives are zero-initialized, everything else is
/// carried over, so the extended policy decodes identically whenever the new
/// logits lose the argmax.
Policy extend_dictionary(const Policy& policy, int new_dict_size);

struct CheckpointMeta {
    SystemTag system = SystemTag::AD1D;
    std::string feature_id;
    std::uint64_t seed = 0;
    int generations = 0;
};

/// Structured-text checkpoint: key=value header, then one decimal theta entry
/// per line (round-trip exact via %.17g).
void save_checkpoint(const std::string& path, const Policy& policy, const CheckpointMeta& meta);
std::pair<Policy, CheckpointMeta> load_checkpoint(const std::string& path);

double softplus(double x);
double sigmoid(double x);

}  // namespace hycop
