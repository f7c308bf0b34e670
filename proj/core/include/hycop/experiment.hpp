#pragma once

#include "hycop/dataset.hpp"
#include "hycop/es.hpp"
#include "hycop/metrics.hpp"

namespace hycop {

/// Everything needed to train one policy on one benchmark.  The architecture
/// hyperparameters live here (not in EsConfig) because they shape theta.
struct TrainConfig {
    EsConfig es;
    FeatureMode feature_mode = FeatureMode::Dimensionless;
    DurationMode duration_mode = DurationMode::Normalized;
    int hidden = 4;
    int k_max = 18;
    int k_min = 3;
    std::uint64_t policy_seed = 42;
};

PolicyArch arch_for(const Dataset& ds, const TrainConfig& cfg);

/// Wires a dataset split into the ES training problem: rollout loss is the
/// RMSE between the executed program's end state and the precomputed
/// reference target; the constant-predictor loss is RMSE(target, u0).
/// Query features are computed once per sample and cached.  `dict` overrides
/// the system dictionary (extended or wall-variant dictionaries).
EsProblem make_problem(const Dataset& ds, const Policy& proto, Split split = Split::Train,
                       const std::vector<PrimitiveSpec>* dict = nullptr);

struct TrainResult {
    Policy policy;
    std::vector<GenerationLog> log;
};

/// init (or warm start) + es_train over the train split.
TrainResult train_policy(const Dataset& ds, const TrainConfig& cfg,
                         const Policy* warm_start = nullptr,
                         const std::function<void(const GenerationLog&)>& on_generation = {},
                         const std::vector<PrimitiveSpec>* dict = nullptr);

/// One row of the benchmark metric table: every entry is a mean over the
/// split's samples.  Optional metrics are means over the samples where they
/// are defined (nullopt when never defined, e.g. cRMSE for ADR or fRMSE on
/// wall grids).
struct EvalRow {
    std::string model;
    std::string split;
    std::optional<double> rel_l2;
    std::optional<FrmseBands> frmse;
    double rmse = 0.0;
    double max_err = 0.0;
    double brmse = 0.0;
    std::optional<double> crmse;
    int diverged = 0;  // rollouts scored against u0 after ExecutionDiverged
};

std::string eval_csv_header();
std::string eval_csv_row(const EvalRow& row);

EvalRow evaluate_policy(const Policy& policy, const Dataset& ds, Split split,
                        const std::string& model_name);
/// Same, but with an explicit dictionary (wall variants, extended dictionaries).
EvalRow evaluate_policy(const Policy& policy, const Dataset& ds, Split split,
                        const std::string& model_name, const std::vector<PrimitiveSpec>& dict);
/// Boundary-unaware baseline: relabels each wall-grid state as periodic, runs
/// the plain periodic dictionary, and scores against the wall reference.
EvalRow evaluate_policy_as_periodic(const Policy& policy, const Dataset& ds, Split split,
                                    const std::string& model_name);
/// Strang baseline at a fixed substep count N_s (standard splitting semantics).
EvalRow evaluate_strang(const Dataset& ds, Split split, int substeps);
/// u(T) := u0, the divergence-penalty reference point.
EvalRow evaluate_constant(const Dataset& ds, Split split);

/// Mean decoded program length over a split (the k-bar of the budget match).
double mean_program_length(const Policy& policy, const Dataset& ds, Split split);

/// Mean fraction of total program duration that one primitive index receives
/// over a split (how much wall-clock the policy spends in that sub-flow).
double duration_share(const Policy& policy, const Dataset& ds, Split split, int primitive_index);

/// A held-out SWE evaluation set on a reflective-wall grid: dam-break initial
/// columns released near the left wall, references integrated by the coupled
/// fine-step solver on the same wall grid.  All samples land in TestId.
Dataset build_wall_dambreak_eval(int count, std::uint64_t seed, int resolution);

/// Primitive-call-matched Strang substeps: one Strang substep costs 2n-1
/// primitive applications for an n-primitive palindrome.
int matched_strang_substeps(double mean_k, int dict_size);

}  // namespace hycop
