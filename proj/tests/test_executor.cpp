#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hycop/executor.hpp"
#include "hycop/field_ops.hpp"
#include "hycop/metrics.hpp"
#include "hycop/reference.hpp"

using namespace hycop;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Field sine_field(const Grid& g, int mode, double amp = 1.0) {
    Field f(g, 1);
    for (int i = 0; i < g.n[0]; ++i)
        f.at(0, i) = amp * std::sin(kTwoPi * mode * g.x(0, i) / g.length[0]);
    return f;
}
}  // namespace

TEST_CASE("commuting exact sub-flows reproduce the coupled ad solution") {
    // Advection and diffusion commute, so [(adv,T),(diff,T)] with full
    // durations equals the exact coupled solution -- the free-mode oracle.
    PdeParams p;
    p.system = SystemTag::AD1D;
    p.c = 1.7;
    p.d = 0.2;
    const Grid g = Grid::make1d(64, 10.0);
    const Field u0 = sine_field(g, 3, 0.9);
    const double T = 0.5;
    const auto dict = dictionary(SystemTag::AD1D);
    Program prog;
    prog.steps = {{0, T}, {1, T}};
    const Field composed = execute(dict, p, u0, prog);
    const Field exact = solve_exact_ad(p, u0, T);
    CHECK(*rel_l2(composed, exact) < 1e-10);

    Program swapped;
    swapped.steps = {{1, T}, {0, T}};
    const Field composed2 = execute(dict, p, u0, swapped);
    CHECK(rmse(composed, composed2) < 1e-12);  // order-insensitive when commuting
}

TEST_CASE("non-commuting burgers sub-flows are order-sensitive") {
    PdeParams p;
    p.system = SystemTag::Burgers1D;
    p.nu = 0.05;
    const Grid g = Grid::make1d(64, 2.0);
    const Field u0 = sine_field(g, 1, 0.8);
    const double T = 0.4;
    const auto dict = dictionary(SystemTag::Burgers1D);
    Program ab, ba;
    ab.steps = {{0, T}, {1, T}};
    ba.steps = {{1, T}, {0, T}};
    const double gap = rmse(execute(dict, p, u0, ab), execute(dict, p, u0, ba));
    CHECK(gap > 1e-4);
}

TEST_CASE("strang schedules emit the literal palindromes") {
    const Program p2 = strang_schedule(2, 1.0, 2);
    REQUIRE(p2.steps.size() == 6);
    const int seq2[] = {0, 1, 0, 0, 1, 0};
    for (int i = 0; i < 6; ++i) CHECK(p2.steps[i].primitive == seq2[i]);
    CHECK(p2.steps[0].tau == doctest::Approx(0.25));
    CHECK(p2.steps[1].tau == doctest::Approx(0.5));
    // each operator advances its full duration T per substep block
    double t0 = 0, t1 = 0;
    for (const auto& st : p2.steps) (st.primitive == 0 ? t0 : t1) += st.tau;
    CHECK(t0 == doctest::Approx(1.0));
    CHECK(t1 == doctest::Approx(1.0));

    const Program p3 = strang_schedule(3, 0.6, 1);
    REQUIRE(p3.steps.size() == 5);
    const int seq3[] = {0, 1, 2, 1, 0};
    for (int i = 0; i < 5; ++i) CHECK(p3.steps[i].primitive == seq3[i]);
    CHECK(p3.steps[2].tau == doctest::Approx(0.6));

    CHECK_THROWS_AS((void)strang_schedule(4, 1.0, 1), ConfigError);
    CHECK_THROWS_AS((void)strang_schedule(2, 1.0, 0), ConfigError);
}

TEST_CASE("strang splitting error on burgers shrinks at second order") {
    PdeParams p;
    p.system = SystemTag::Burgers1D;
    p.nu = 0.05;
    const Grid g = Grid::make1d(64, 2.0);
    const Field u0 = sine_field(g, 1, 0.7);
    const double T = 0.4;
    const auto dict = dictionary(SystemTag::Burgers1D);
    const Field ref = solve_coupled_finestep(p, u0, T);
    ExecOptions fine;
    fine.substep_multiplier = 10;  // suppress the primitive error floor
    const double e4 = rmse(execute(dict, p, u0, strang_schedule(2, T, 4), fine), ref);
    const double e8 = rmse(execute(dict, p, u0, strang_schedule(2, T, 8), fine), ref);
    const double slope = std::log2(e4 / e8);
    CHECK(slope > 1.6);
    CHECK(slope < 2.4);
}

TEST_CASE("executor validates step indices and reports divergence position") {
    PdeParams p;
    p.system = SystemTag::AD1D;
    p.c = 1.0;
    p.d = 0.1;
    const Grid g = Grid::make1d(64, 10.0);
    const Field u0 = sine_field(g, 1);
    const auto dict = dictionary(SystemTag::AD1D);
    Program bad;
    bad.steps = {{5, 0.1}};
    CHECK_THROWS_AS((void)execute(dict, p, u0, bad), StateShapeError);

    // negative diffusion blows up the top modes -> ExecutionDiverged at step 1
    PdeParams unstable = p;
    unstable.d = -20.0;
    Program prog;
    prog.steps = {{0, 0.1}, {1, 5.0}};
    try {
        (void)execute(dict, unstable, u0, prog);
        FAIL("expected ExecutionDiverged");
    } catch (const ExecutionDiverged& e) {
        CHECK(e.step_index == 1);
    }
}

TEST_CASE("allocation expansion gives every mechanism the full horizon") {
    const double T = 0.5;
    Program prog;
    prog.steps = {{0, 0.20}, {1, 0.06}, {0, 0.16}, {2, 0.08}};
    const Program ex = expand_allocations(prog, T);
    REQUIRE(ex.steps.size() == 4);
    double tot[3] = {0, 0, 0};
    for (const auto& st : ex.steps) tot[st.primitive] += st.tau;
    CHECK(tot[0] == doctest::Approx(T));
    CHECK(tot[1] == doctest::Approx(T));
    CHECK(tot[2] == doctest::Approx(T));
    // relative interleaving within a mechanism is preserved
    CHECK(ex.steps[0].tau / ex.steps[2].tau == doctest::Approx(0.20 / 0.16));

    // expanded ad programs hit the commuting-exact oracle regardless of shares
    PdeParams p;
    p.system = SystemTag::AD1D;
    p.c = 1.3;
    p.d = 0.15;
    const Grid g = Grid::make1d(64, 10.0);
    const Field u0 = sine_field(g, 2, 0.6);
    Program alloc;
    alloc.steps = {{0, 0.1}, {1, 0.3}, {0, 0.1}};
    const Field got = execute(dictionary(SystemTag::AD1D), p, u0,
                              expand_allocations(alloc, 0.5));
    CHECK(*rel_l2(got, solve_exact_ad(p, u0, 0.5)) < 1e-10);

    Program oob;
    oob.steps = {{-1, 0.5}};
    CHECK_THROWS_AS((void)expand_allocations(oob, 0.5), StateShapeError);
}

TEST_CASE("multi-time execution matches independent single-horizon decodes") {
    PdeParams p;
    p.system = SystemTag::AD1D;
    p.c = 1.0;
    p.d = 0.1;
    const Grid g = Grid::make1d(64, 10.0);
    const Field u0 = sine_field(g, 2, 0.8);
    const auto dict = dictionary(SystemTag::AD1D);
    PolicyArch a;
    const Policy pol = init_policy(a, 5);
    const std::vector<double> times{0.2, 0.4, 0.6};
    const auto multi = execute_multi_time(pol, dict, p, u0, times);
    REQUIRE(multi.size() == 3);
    for (size_t i = 0; i < times.size(); ++i) {
        const auto feats = extract_features(SystemTag::AD1D, p, u0, times[i]);
        const Program prog =
            expand_allocations(decode_program(pol, feats, times[i]), times[i]);
        const Field single = execute(dict, p, u0, prog);
        CHECK(rmse(multi[i], single) == 0.0);
    }
}
