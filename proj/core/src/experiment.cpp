#include "hycop/experiment.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "hycop/field_ops.hpp"
#include "hycop/parallel.hpp"
#include "hycop/reference.hpp"

namespace hycop {

namespace {

std::vector<double> sample_features(const Dataset& ds, const Sample& sm, FeatureMode mode) {
    if (mode == FeatureMode::RawIc) return raw_ic_features(sm.u0, sm.T);
    return extract_features(ds.spec.system, sm.params, sm.u0, sm.T);
}

// decode + allocation expansion: the executed form of a policy's program
Program decode_executed(const Policy& policy, const std::vector<double>& feats, double T) {
    Program prog = decode_program(policy, feats, T);
    if (policy.arch.duration_mode == DurationMode::Normalized)
        prog = expand_allocations(prog, T);
    return prog;
}

}  // namespace

PolicyArch arch_for(const Dataset& ds, const TrainConfig& cfg) {
    const SystemTag sys = ds.spec.system;
    const int total = (sys == SystemTag::ADR2D) ? ds.spec.resolution * ds.spec.resolution
                                                : ds.spec.resolution;
    PolicyArch arch;
    arch.input_dim = feature_dim(sys, cfg.feature_mode, total, channel_count(sys));
    arch.hidden = cfg.hidden;
    arch.dict_size = static_cast<int>(dictionary(sys).size());
    arch.k_max = cfg.k_max;
    arch.k_min = cfg.k_min;
    arch.duration_mode = cfg.duration_mode;
    arch.feature_mode = cfg.feature_mode;
    return arch;
}

EsProblem make_problem(const Dataset& ds, const Policy& proto, Split split,
                       const std::vector<PrimitiveSpec>* dict_override) {
    const auto idx = ds.split_indices(split);
    auto feats = std::make_shared<std::vector<std::vector<double>>>(idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        (*feats)[i] = sample_features(ds, ds.samples[idx[i]], proto.arch.feature_mode);
    auto dict = std::make_shared<std::vector<PrimitiveSpec>>(
        dict_override ? *dict_override : dictionary(ds.spec.system));
    const PolicyArch arch = proto.arch;

    EsProblem prob;
    prob.num_samples = static_cast<int>(idx.size());
    prob.rollout_loss = [&ds, idx, feats, dict, arch](const std::vector<double>& theta, int i) {
        const Sample& sm = ds.samples[idx[i]];
        Policy cand{arch, theta};
        const Program prog = decode_executed(cand, (*feats)[i], sm.T);
        const Field pred = execute(*dict, sm.params, sm.u0, prog);
        return rmse(pred, sm.target);
    };
    prob.constant_predictor_loss = [&ds, idx](int i) {
        const Sample& sm = ds.samples[idx[i]];
        return rmse(sm.u0, sm.target);
    };
    return prob;
}

TrainResult train_policy(const Dataset& ds, const TrainConfig& cfg, const Policy* warm_start,
                         const std::function<void(const GenerationLog&)>& on_generation,
                         const std::vector<PrimitiveSpec>* dict_override) {
    PolicyArch arch = arch_for(ds, cfg);
    if (dict_override) arch.dict_size = static_cast<int>(dict_override->size());
    Policy start;
    if (warm_start) {
        if (warm_start->arch.param_count() != arch.param_count() ||
            warm_start->arch.input_dim != arch.input_dim)
            throw ConfigError("train_policy: warm-start architecture mismatch");
        start = *warm_start;
    } else {
        start = init_policy(arch, cfg.policy_seed);
    }
    const EsProblem prob = make_problem(ds, start, Split::Train, dict_override);
    TrainResult out;
    out.policy = es_train(start, prob, cfg.es, &out.log, on_generation);
    return out;
}

namespace {

// Shared accumulation for all three evaluators: the caller supplies the
// per-sample prediction (or throws ExecutionDiverged to score u0 instead).
EvalRow accumulate_eval(const Dataset& ds, Split split, const std::string& model,
                        const std::function<Field(const Sample&)>& predict) {
    const auto idx = ds.split_indices(split);
    const size_t n = idx.size();
    struct Per {
        std::optional<double> rel;
        std::optional<FrmseBands> fr;
        double rmse_v = 0, maxe = 0, br = 0;
        std::optional<double> cr;
        bool diverged = false;
    };
    std::vector<Per> per(n);
    parallel_for(static_cast<int>(n), [&](int i) {
        const Sample& sm = ds.samples[idx[i]];
        Field pred;
        try {
            pred = predict(sm);
        } catch (const ExecutionDiverged&) {
            pred = sm.u0;
            per[i].diverged = true;
        }
        per[i].rel = rel_l2(pred, sm.target);
        if (sm.u0.grid.boundary == Boundary::Periodic)
            per[i].fr = frmse_bands(pred, sm.target);
        per[i].rmse_v = rmse(pred, sm.target);
        per[i].maxe = max_err(pred, sm.target);
        per[i].br = brmse(pred, sm.target);
        per[i].cr = crmse(ds.spec.system, pred, sm.target);
    });

    EvalRow row;
    row.model = model;
    row.split = (split == Split::Train) ? "train" : (split == Split::TestId ? "test_id" : "test_ood");
    double rel = 0, frl = 0, frm = 0, frh = 0, cr = 0;
    int nrel = 0, nfr = 0, ncr = 0;
    for (const auto& p : per) {
        if (p.rel) {
            rel += *p.rel;
            ++nrel;
        }
        if (p.fr) {
            frl += p.fr->low;
            frm += p.fr->mid;
            frh += p.fr->high;
            ++nfr;
        }
        row.rmse += p.rmse_v;
        row.max_err += p.maxe;
        row.brmse += p.br;
        if (p.cr) {
            cr += *p.cr;
            ++ncr;
        }
        if (p.diverged) ++row.diverged;
    }
    const double dn = static_cast<double>(n);
    row.rmse /= dn;
    row.max_err /= dn;
    row.brmse /= dn;
    if (nrel) row.rel_l2 = rel / nrel;
    if (nfr) row.frmse = FrmseBands{frl / nfr, frm / nfr, frh / nfr};
    if (ncr) row.crmse = cr / ncr;
    return row;
}

}  // namespace

EvalRow evaluate_policy(const Policy& policy, const Dataset& ds, Split split,
                        const std::string& model_name) {
    return evaluate_policy(policy, ds, split, model_name, dictionary(ds.spec.system));
}

EvalRow evaluate_policy(const Policy& policy, const Dataset& ds, Split split,
                        const std::string& model_name, const std::vector<PrimitiveSpec>& dict) {
    return accumulate_eval(ds, split, model_name, [&](const Sample& sm) {
        const auto f = sample_features(ds, sm, policy.arch.feature_mode);
        return execute(dict, sm.params, sm.u0, decode_executed(policy, f, sm.T));
    });
}

EvalRow evaluate_policy_as_periodic(const Policy& policy, const Dataset& ds, Split split,
                                    const std::string& model_name) {
    const auto dict = dictionary(ds.spec.system);
    return accumulate_eval(ds, split, model_name, [&](const Sample& sm) {
        Field u0 = sm.u0;
        u0.grid.boundary = Boundary::Periodic;
        Sample relabeled = sm;
        relabeled.u0 = u0;
        const auto f = sample_features(ds, relabeled, policy.arch.feature_mode);
        Field pred = execute(dict, sm.params, u0, decode_executed(policy, f, sm.T));
        pred.grid.boundary = sm.u0.grid.boundary;
        return pred;
    });
}

EvalRow evaluate_strang(const Dataset& ds, Split split, int substeps) {
    const auto dict = dictionary(ds.spec.system);
    std::ostringstream name;
    name << "strang_n" << substeps;
    return accumulate_eval(ds, split, name.str(), [&](const Sample& sm) {
        const Program prog = strang_schedule(static_cast<int>(dict.size()), sm.T, substeps);
        return execute(dict, sm.params, sm.u0, prog);
    });
}

EvalRow evaluate_constant(const Dataset& ds, Split split) {
    return accumulate_eval(ds, split, "constant", [](const Sample& sm) { return sm.u0; });
}

double mean_program_length(const Policy& policy, const Dataset& ds, Split split) {
    const auto idx = ds.split_indices(split);
    double acc = 0.0;
    for (int i : idx) {
        const Sample& sm = ds.samples[i];
        const auto f = sample_features(ds, sm, policy.arch.feature_mode);
        acc += static_cast<double>(decode_program(policy, f, sm.T).steps.size());
    }
    return idx.empty() ? 0.0 : acc / static_cast<double>(idx.size());
}

double duration_share(const Policy& policy, const Dataset& ds, Split split,
                      int primitive_index) {
    const auto idx = ds.split_indices(split);
    double acc = 0.0;
    for (int i : idx) {
        const Sample& sm = ds.samples[i];
        const auto f = sample_features(ds, sm, policy.arch.feature_mode);
        const Program prog = decode_program(policy, f, sm.T);
        double total = 0.0, part = 0.0;
        for (const auto& st : prog.steps) {
            total += st.tau;
            if (st.primitive == primitive_index) part += st.tau;
        }
        if (total > 0.0) acc += part / total;
    }
    return idx.empty() ? 0.0 : acc / static_cast<double>(idx.size());
}

Dataset build_wall_dambreak_eval(int count, std::uint64_t seed, int resolution) {
    Dataset ds;
    ds.spec.system = SystemTag::SWE1D;
    ds.spec.resolution = resolution;
    ds.spec.n_train = 0;
    ds.spec.n_test_id = count;
    ds.spec.n_test_ood = 0;
    ds.spec.seed = seed;
    ds.samples.resize(count);
    parallel_for(count, [&](int i) {
        const std::uint64_t s = seed ^ (static_cast<std::uint64_t>(i + 1) << 8);
        Sample sm;
        sm.params = sample_params(SystemTag::SWE1D, s, false);
        sm.ic = sample_ic_descriptor(SystemTag::SWE1D, kWallDamBreak, s, false);
        sm.T = eval_horizon(SystemTag::SWE1D);
        sm.split = static_cast<int>(Split::TestId);
        const Grid g =
            grid_for(SystemTag::SWE1D, sm.params, resolution, Boundary::ReflectiveWall);
        sm.u0 = build_ic(SystemTag::SWE1D, sm.ic, g);
        sm.target = solve_coupled_finestep(sm.params, sm.u0, sm.T);
        ds.samples[i] = sm;
    });
    return ds;
}

int matched_strang_substeps(double mean_k, int dict_size) {
    const int cost = 2 * dict_size - 1;
    return std::max(1, static_cast<int>(std::lround(mean_k / cost)));
}

std::string eval_csv_header() {
    return "model,split,RelL2,fRMSE_low,fRMSE_mid,fRMSE_high,RMSE,MaxErr,bRMSE,cRMSE,diverged";
}

std::string eval_csv_row(const EvalRow& r) {
    std::ostringstream os;
    os.precision(8);
    auto opt = [&](const std::optional<double>& v) {
        if (v)
            os << *v;
        else
            os << "na";
    };
    os << r.model << ',' << r.split << ',';
    opt(r.rel_l2);
    os << ',';
    if (r.frmse)
        os << r.frmse->low << ',' << r.frmse->mid << ',' << r.frmse->high;
    else
        os << "na,na,na";
    os << ',' << r.rmse << ',' << r.max_err << ',' << r.brmse << ',';
    opt(r.crmse);
    os << ',' << r.diverged;
    return os.str();
}

}  // namespace hycop
