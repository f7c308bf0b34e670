#include "hycop/executor.hpp"

#include <array>

#include "hycop/errors.hpp"
#include "hycop/field_ops.hpp"

namespace hycop {

Field execute(const std::vector<PrimitiveSpec>& dict, const PdeParams& params, const Field& u0,
              const Program& program, const ExecOptions& opts) {
    ApplyOptions ao;
    ao.substep_multiplier = opts.substep_multiplier;
    Field state = u0;
    for (size_t s = 0; s < program.steps.size(); ++s) {
        const auto& step = program.steps[s];
        if (step.primitive < 0 || step.primitive >= static_cast<int>(dict.size()))
            throw StateShapeError("execute: primitive index out of range at step " +
                                  std::to_string(s));
        state = apply_primitive(dict[step.primitive], params, state, step.tau, ao);
        if (!all_finite(state))
            throw ExecutionDiverged("execute: state diverged after step " + std::to_string(s),
                                    static_cast<int>(s));
    }
    return state;
}

Program expand_allocations(const Program& program, double T) {
    std::array<double, 64> totals{};
    for (const auto& st : program.steps) {
        if (st.primitive < 0 || st.primitive >= static_cast<int>(totals.size()))
            throw StateShapeError("expand_allocations: primitive index out of range");
        totals[st.primitive] += st.tau;
    }
    Program out = program;
    for (auto& st : out.steps)
        if (totals[st.primitive] > 0.0) st.tau *= T / totals[st.primitive];
    return out;
}

std::vector<Field> execute_multi_time(const Policy& policy,
                                      const std::vector<PrimitiveSpec>& dict,
                                      const PdeParams& params, const Field& u0,
                                      const std::vector<double>& times) {
    std::vector<Field> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto feats = (policy.arch.feature_mode == FeatureMode::RawIc)
                               ? raw_ic_features(u0, t)
                               : extract_features(params.system, params, u0, t);
        Program prog = decode_program(policy, feats, t);
        if (policy.arch.duration_mode == DurationMode::Normalized)
            prog = expand_allocations(prog, t);
        out.push_back(execute(dict, params, u0, prog));
    }
    return out;
}

Program strang_schedule(int dict_size, double T, int substeps) {
    if (dict_size != 2 && dict_size != 3)
        throw ConfigError("strang_schedule: only 2- or 3-operator palindromes are defined");
    if (substeps < 1) throw ConfigError("strang_schedule: substeps must be >= 1");
    const double h = T / substeps;
    Program p;
    for (int s = 0; s < substeps; ++s) {
        if (dict_size == 2) {
            p.steps.push_back({0, 0.5 * h});
            p.steps.push_back({1, h});
            p.steps.push_back({0, 0.5 * h});
        } else {
            p.steps.push_back({0, 0.5 * h});
            p.steps.push_back({1, 0.5 * h});
            p.steps.push_back({2, h});
            p.steps.push_back({1, 0.5 * h});
            p.steps.push_back({0, 0.5 * h});
        }
    }
    return p;
}

}  // namespace hycop
