#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hycop/es.hpp"
#include "hycop/parallel.hpp"

using namespace hycop;

namespace {

// Quadratic bowl: rollout loss is ||theta - theta*||^2 regardless of sample.
EsProblem quadratic_problem(const std::vector<double>& target) {
    EsProblem prob;
    prob.num_samples = 4;
    prob.rollout_loss = [target](const std::vector<double>& theta, int) {
        double s = 0;
        for (size_t i = 0; i < theta.size(); ++i) {
            const double d = theta[i] - target[i];
            s += d * d;
        }
        return s;
    };
    prob.constant_predictor_loss = [](int) { return 1e3; };
    return prob;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Policy flat_policy(const std::vector<double>& theta) {
    Policy p;
    p.theta = theta;
    return p;
}

}  // namespace

TEST_CASE("centered-rank shaping: examples, ties, zero sum, monotone invariance") {
    const auto w = rank_shape({1.0, 3.0});
    CHECK(w[0] == doctest::Approx(0.5));   // best loss -> +0.5
    CHECK(w[1] == doctest::Approx(-0.5));

    const auto eq = rank_shape({2.0, 2.0, 2.0});
    for (double x : eq) CHECK(x == doctest::Approx(0.0));

    const std::vector<double> losses{0.4, 1.2, 0.1, 0.9};
    const auto w1 = rank_shape(losses);
    std::vector<double> transformed;
    for (double l : losses) transformed.push_back(std::exp(3.0 * l));  // strictly monotone
    const auto w2 = rank_shape(transformed);
    double sum = 0;
    for (size_t i = 0; i < w1.size(); ++i) {
        CHECK(w1[i] == doctest::Approx(w2[i]));
        sum += w1[i];
    }
    CHECK(sum == doctest::Approx(0.0));
    // tied pair shares the averaged rank
    const auto wt = rank_shape({1.0, 2.0, 2.0, 5.0});
    CHECK(wt[1] == doctest::Approx(wt[2]));
    CHECK(wt[0] == doctest::Approx(0.5));
    CHECK(wt[3] == doctest::Approx(-0.5));
}

TEST_CASE("es contracts toward the optimum of a quadratic bowl") {
    const std::vector<double> target{0.4, -0.3, 0.2, 0.1, -0.5};
    const std::vector<double> start{1.0, 0.7, -0.8, 0.9, 0.5};
    EsConfig cfg;
    cfg.population = 50;
    cfg.sigma = 0.05;
    cfg.lr = 0.05;
    cfg.weight_decay = 0.0;
    cfg.generations = 300;
    cfg.minibatch = 2;
    std::vector<GenerationLog> log;
    const Policy out = es_train(flat_policy(start), quadratic_problem(target), cfg, &log);
    const double d0 = dist(start, target);
    const double d1 = dist(out.theta, target);
    CHECK(d1 < d0 / 10.0);  // >= 10x contraction
    CHECK(log.size() == 300);
    CHECK(log.back().mean_loss < log.front().mean_loss);
    CHECK(log.back().diverged == 0);
}

TEST_CASE("training is byte-reproducible and thread-count invariant") {
    const std::vector<double> target{0.2, -0.1, 0.3};
    const std::vector<double> start{0.8, 0.8, 0.8};
    EsConfig cfg;
    cfg.population = 20;
    cfg.sigma = 0.05;
    cfg.lr = 0.05;
    cfg.generations = 25;
    cfg.minibatch = 2;

    set_thread_count(1);
    const Policy a = es_train(flat_policy(start), quadratic_problem(target), cfg);
    const Policy b = es_train(flat_policy(start), quadratic_problem(target), cfg);
    set_thread_count(4);
    const Policy c = es_train(flat_policy(start), quadratic_problem(target), cfg);
    set_thread_count(0);
    CHECK(a.theta == b.theta);
    CHECK(a.theta == c.theta);

    EsConfig other = cfg;
    other.seed = 43;
    const Policy d = es_train(flat_policy(start), quadratic_problem(target), other);
    CHECK(a.theta != d.theta);
}

TEST_CASE("diverged rollouts are capped at 10x the constant-predictor loss") {
    // A problem that always throws: training must not crash, every rollout is
    // counted as diverged, and weight decay is the only drift.
    EsProblem prob;
    prob.num_samples = 2;
    prob.rollout_loss = [](const std::vector<double>&, int) -> double {
        throw ExecutionDiverged("boom", 0);
    };
    prob.constant_predictor_loss = [](int) { return 2.0; };
    EsConfig cfg;
    cfg.population = 8;
    cfg.generations = 3;
    cfg.minibatch = 2;
    cfg.weight_decay = 1e-3;
    std::vector<GenerationLog> log;
    const Policy out = es_train(flat_policy({1.0, 1.0}), prob, cfg, &log);
    for (const auto& gl : log) {
        CHECK(gl.diverged == 2 * 8 * 2);  // every (candidate, sample) pair
        CHECK(gl.mean_loss == doctest::Approx(20.0));  // 10 * cap base
    }
    // all losses tie -> zero gradient -> pure decay
    CHECK(out.theta[0] == doctest::Approx(std::pow(1.0 - 1e-3, 3)));
}

TEST_CASE("config validation") {
    EsConfig cfg;
    cfg.population = 0;
    CHECK_THROWS_AS((void)es_train(flat_policy({1.0}), quadratic_problem({0.0}), cfg),
                    ConfigError);
    EsProblem empty;
    empty.num_samples = 0;
    CHECK_THROWS_AS((void)es_train(flat_policy({1.0}), empty, EsConfig{}), ConfigError);
}
