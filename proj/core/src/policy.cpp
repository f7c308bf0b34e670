#include "hycop/policy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hycop/errors.hpp"
#include "hycop/rng.hpp"

namespace hycop {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Policy init_policy(const PolicyArch& arch, std::uint64_t seed) {
    Policy p;
    p.arch = arch;
    p.theta.assign(arch.param_count(), 0.0);
    Rng rng(seed, {0x706f6cULL});
    const double s1 = 1.0 / std::sqrt(static_cast<double>(arch.input_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(arch.hidden));
    size_t idx = 0;
    for (int h = 0; h < arch.hidden; ++h)
        for (int i = 0; i < arch.input_dim; ++i) p.theta[idx++] = rng.uniform(-0.5, 0.5) * s1;
    idx += arch.hidden;  // b1 = 0
    for (int o = 0; o < arch.output_dim(); ++o)
        for (int h = 0; h < arch.hidden; ++h) p.theta[idx++] = rng.uniform(-0.5, 0.5) * s2;
    // b2 = 0
    return p;
}

Program decode_program(const Policy& policy, const std::vector<double>& features, double T) {
    const PolicyArch& a = policy.arch;
    if (static_cast<int>(policy.theta.size()) != a.param_count())
        throw ParamShapeError("decode_program: theta length does not match architecture");
    if (static_cast<int>(features.size()) != a.input_dim)
        throw ParamShapeError("decode_program: feature length does not match input_dim");
    if (!std::isfinite(T) || T <= 0.0)
        throw InvalidDuration("decode_program: horizon must be positive");

    const double* W1 = policy.theta.data();
    const double* b1 = W1 + static_cast<size_t>(a.hidden) * a.input_dim;
    const double* W2 = b1 + a.hidden;
    const double* b2 = W2 + static_cast<size_t>(a.output_dim()) * a.hidden;

    std::vector<double> hid(a.hidden);
    for (int h = 0; h < a.hidden; ++h) {
        double s = b1[h];
        for (int i = 0; i < a.input_dim; ++i) s += W1[static_cast<size_t>(h) * a.input_dim + i] * features[i];
        hid[h] = std::tanh(s);
    }
    std::vector<double> out(a.output_dim());
    for (int o = 0; o < a.output_dim(); ++o) {
        double s = b2[o];
        for (int h = 0; h < a.hidden; ++h) s += W2[static_cast<size_t>(o) * a.hidden + h] * hid[h];
        if (!std::isfinite(s)) throw PolicyNumericalError("decode_program: non-finite head output");
        out[o] = s;
    }

    const int n = a.dict_size;
    const double len_head = out[a.k_max * (n + 1)];
    int k = static_cast<int>(std::lround(a.k_min + (a.k_max - a.k_min) * sigmoid(len_head)));
    k = std::max(a.k_min, std::min(a.k_max, k));

    Program prog;
    prog.steps.reserve(k);
    double sum = 0.0;
    for (int r = 0; r < k; ++r) {
        const double* z = &out[static_cast<size_t>(r) * (n + 1)];
        int best = 0;
        for (int j = 1; j < n; ++j)
            if (z[j] > z[best]) best = j;  // ties keep the lowest index
        const double tau = softplus(z[n]);
        prog.steps.push_back({best, tau});
        sum += tau;
    }
    if (a.duration_mode == DurationMode::Normalized) {
        if (sum < 1e-300) {
            for (auto& st : prog.steps) st.tau = T / k;
        } else {
            const double scale = T / sum;
            for (auto& st : prog.steps) st.tau *= scale;
        }
    }
    return prog;
}

Policy extend_dictionary(const Policy& policy, int new_dict_size) {
    const PolicyArch& a = policy.arch;
    if (new_dict_size < a.dict_size)
        throw ConfigError("extend_dictionary: dictionary can only grow");
    PolicyArch na = a;
    na.dict_size = new_dict_size;
    Policy out;
    out.arch = na;
    out.theta.assign(na.param_count(), 0.0);

    const size_t w1b1 = static_cast<size_t>(a.hidden) * a.input_dim + a.hidden;
    for (size_t i = 0; i < w1b1; ++i) out.theta[i] = policy.theta[i];

    auto old_row = [&](int o) { return policy.theta.data() + w1b1 + static_cast<size_t>(o) * a.hidden; };
    auto new_row = [&](int o) { return out.theta.data() + w1b1 + static_cast<size_t>(o) * na.hidden; };
    const double* old_b2 = policy.theta.data() + w1b1 + static_cast<size_t>(a.output_dim()) * a.hidden;
    double* new_b2 = out.theta.data() + w1b1 + static_cast<size_t>(na.output_dim()) * na.hidden;

    auto copy_row = [&](int from, int to) {
        const double* src = old_row(from);
        double* dst = new_row(to);
        for (int h = 0; h < a.hidden; ++h) dst[h] = src[h];
        new_b2[to] = old_b2[from];
    };
    for (int r = 0; r < a.k_max; ++r) {
        for (int j = 0; j < a.dict_size; ++j)
            copy_row(r * (a.dict_size + 1) + j, r * (na.dict_size + 1) + j);
        // new logit rows stay zero
        copy_row(r * (a.dict_size + 1) + a.dict_size, r * (na.dict_size + 1) + na.dict_size);
    }
    copy_row(a.k_max * (a.dict_size + 1), na.k_max * (na.dict_size + 1));  // length head
    return out;
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void save_checkpoint(const std::string& path, const Policy& policy, const CheckpointMeta& meta) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FileFormatError("cannot open checkpoint for writing: " + path);
    const PolicyArch& a = policy.arch;
    f << "hycop-checkpoint v1\n";
    f << "system=" << to_string(meta.system) << "\n";
    f << "features=" << meta.feature_id << "\n";
    f << "input_dim=" << a.input_dim << "\n";
    f << "hidden=" << a.hidden << "\n";
    f << "dict_size=" << a.dict_size << "\n";
    f << "k_max=" << a.k_max << "\n";
    f << "k_min=" << a.k_min << "\n";
    f << "duration_mode=" << (a.duration_mode == DurationMode::Normalized ? "normalized" : "free") << "\n";
    f << "feature_mode=" << (a.feature_mode == FeatureMode::Dimensionless ? "dimensionless" : "raw_ic") << "\n";
    f << "seed=" << meta.seed << "\n";
    f << "generations=" << meta.generations << "\n";
    f << "theta_len=" << policy.theta.size() << "\n";
    f << "theta:\n";
    for (double x : policy.theta) f << fmt_double(x) << "\n";
    if (!f) throw FileFormatError("checkpoint write failed: " + path);
}

std::pair<Policy, CheckpointMeta> load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FileFormatError("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "hycop-checkpoint v1")
        throw FileFormatError("bad checkpoint magic in " + path);

    Policy p;
    CheckpointMeta meta;
    size_t theta_len = 0;
    while (std::getline(f, line)) {
        if (line == "theta:") break;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FileFormatError("bad checkpoint header line: " + line);
        const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "system") meta.system = system_from_string(val);
        else if (key == "features") meta.feature_id = val;
        else if (key == "input_dim") p.arch.input_dim = std::stoi(val);
        else if (key == "hidden") p.arch.hidden = std::stoi(val);
        else if (key == "dict_size") p.arch.dict_size = std::stoi(val);
        else if (key == "k_max") p.arch.k_max = std::stoi(val);
        else if (key == "k_min") p.arch.k_min = std::stoi(val);
        else if (key == "duration_mode")
            p.arch.duration_mode = (val == "free") ? DurationMode::Free : DurationMode::Normalized;
        else if (key == "feature_mode")
            p.arch.feature_mode = (val == "raw_ic") ? FeatureMode::RawIc : FeatureMode::Dimensionless;
        else if (key == "seed") meta.seed = std::stoull(val);
        else if (key == "generations") meta.generations = std::stoi(val);
        else if (key == "theta_len") theta_len = std::stoul(val);
        else throw FileFormatError("unknown checkpoint header key: " + key);
    }
    if (theta_len != static_cast<size_t>(p.arch.param_count()))
        throw FileFormatError("checkpoint theta_len does not match architecture");
    p.theta.reserve(theta_len);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        p.theta.push_back(std::stod(line));
    }
    if (p.theta.size() != theta_len) throw FileFormatError("truncated checkpoint: " + path);
    return {p, meta};
}

}  // namespace hycop
