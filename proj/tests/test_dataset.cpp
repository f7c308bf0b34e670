#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hycop/dataset.hpp"
#include "hycop/field_ops.hpp"
#include "hycop/metrics.hpp"

using namespace hycop;

namespace {
BenchmarkSpec tiny_spec(SystemTag sys) {
    BenchmarkSpec s = default_benchmark_spec(sys);
    s.n_train = 6;
    s.n_test_id = 3;
    s.n_test_ood = 3;
    return s;
}
}  // namespace

TEST_CASE("dataset generation is deterministic and correctly split") {
    const auto spec = tiny_spec(SystemTag::AD1D);
    const Dataset a = build_dataset(spec);
    const Dataset b = build_dataset(spec);
    REQUIRE(a.samples.size() == 12);
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].u0.v == b.samples[i].u0.v);
        CHECK(a.samples[i].target.v == b.samples[i].target.v);
        CHECK(a.samples[i].T == b.samples[i].T);
    }
    CHECK(a.split_indices(Split::Train).size() == 6);
    CHECK(a.split_indices(Split::TestId).front() == 6);
    CHECK(a.split_indices(Split::TestOod).back() == 11);
    for (int i : a.split_indices(Split::TestId)) CHECK(a.samples[i].split == 1);

    BenchmarkSpec other = spec;
    other.seed = 43;
    const Dataset c = build_dataset(other);
    CHECK(a.samples[0].u0.v != c.samples[0].u0.v);
}

TEST_CASE("ad targets re-solve against the closed form") {
    const Dataset ds = build_dataset(tiny_spec(SystemTag::AD1D));
    for (const auto& sm : ds.samples) {
        const Field again = solve_exact_ad(sm.params, sm.u0, sm.T);
        CHECK(rmse(again, sm.target) < 1e-12);
    }
}

TEST_CASE("parameter ranges respect the id/ood unions") {
    const auto spec = tiny_spec(SystemTag::AD1D);
    const Dataset ds = build_dataset(spec);
    for (int i : ds.split_indices(Split::Train)) {
        CHECK(ds.samples[i].params.c >= 0.5);
        CHECK(ds.samples[i].params.c <= 3.0);
        CHECK(ds.samples[i].params.d >= 0.01);
        CHECK(ds.samples[i].params.d <= 0.5);
        CHECK(ds.samples[i].T >= 0.1);
        CHECK(ds.samples[i].T <= 1.0);
    }
    for (int i : ds.split_indices(Split::TestId)) CHECK(ds.samples[i].T == doctest::Approx(0.5));
    for (int i : ds.split_indices(Split::TestOod)) {
        const double c = ds.samples[i].params.c;
        const double d = ds.samples[i].params.d;
        CHECK(((c >= 0.1 && c <= 0.5) || (c >= 3.0 && c <= 5.0)));
        CHECK(((d >= 0.001 && d <= 0.01) || (d >= 0.5 && d <= 1.0)));
    }
}

TEST_CASE("swe initial conditions keep positive depth; burgers stay bounded") {
    const Dataset swe = build_dataset(tiny_spec(SystemTag::SWE1D));
    for (const auto& sm : swe.samples) {
        for (int i = 0; i < sm.u0.grid.total(); ++i) CHECK(sm.u0.at(0, i) > 0.0);
        for (int i = 0; i < sm.target.grid.total(); ++i) CHECK(sm.target.at(0, i) > 0.0);
    }
    const Dataset bur = build_dataset(tiny_spec(SystemTag::Burgers1D));
    for (const auto& sm : bur.samples) CHECK(all_finite(sm.u0, 10.0));
}

TEST_CASE("ks initial conditions are zero-mean and horizons land on the grid") {
    const Dataset ks = build_dataset(tiny_spec(SystemTag::KS1D));
    for (const auto& sm : ks.samples) {
        CHECK(std::abs(integrate(sm.u0, 0)) / sm.u0.grid.length[0] < 1e-12);
        const double steps = sm.T / 0.02;
        CHECK(std::abs(steps - std::round(steps)) < 1e-9);
        CHECK(sm.u0.grid.length[0] == doctest::Approx(2 * 3.14159265358979 * sm.params.width)
                                          .epsilon(1e-6));
    }
}

TEST_CASE("every ic family evaluates on any grid, unknown families throw") {
    for (SystemTag sys : {SystemTag::AD1D, SystemTag::Burgers1D, SystemTag::SWE1D,
                          SystemTag::ADR2D, SystemTag::KS1D}) {
        PdeParams p = sample_params(sys, 3, false);
        for (int fam = 0; fam < ic_family_count(sys); ++fam) {
            const auto d = sample_ic_descriptor(sys, fam, 3, false);
            const Field lo = build_ic(sys, d, grid_for(sys, p, default_resolution(sys)));
            const Field hi = build_ic(sys, d, grid_for(sys, p, 2 * default_resolution(sys)));
            CHECK(all_finite(lo, 100.0));
            CHECK(all_finite(hi, 100.0));
        }
        CHECK_THROWS_AS((void)sample_ic_descriptor(sys, 57, 3, false), UnknownIcFamily);
    }
    // wall dam-break family (swe-only) builds on a wall grid
    PdeParams p = sample_params(SystemTag::SWE1D, 4, false);
    const auto d = sample_ic_descriptor(SystemTag::SWE1D, kWallDamBreak, 4, false);
    const Grid wall = grid_for(SystemTag::SWE1D, p, 64, Boundary::ReflectiveWall);
    const Field f = build_ic(SystemTag::SWE1D, d, wall);
    CHECK(f.at(0, 0) > f.at(0, 63));  // higher water near the left wall
    for (int i = 0; i < 64; ++i) CHECK(f.at(1, i) == 0.0);
}

TEST_CASE("adr initial conditions stay in the logistic range") {
    const Dataset ds = build_dataset(tiny_spec(SystemTag::ADR2D));
    for (const auto& sm : ds.samples)
        for (double v : sm.u0.v) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
}

TEST_CASE("save/load round-trips the dataset byte-exactly") {
    const std::string path = "/tmp/hycop_test_dataset.bin";
    const Dataset ds = build_dataset(tiny_spec(SystemTag::SWE1D));
    save_dataset(ds, path);
    const Dataset back = load_dataset(path);
    CHECK(back.spec.system == ds.spec.system);
    CHECK(back.spec.seed == ds.spec.seed);
    REQUIRE(back.samples.size() == ds.samples.size());
    for (size_t i = 0; i < ds.samples.size(); ++i) {
        CHECK(back.samples[i].u0.v == ds.samples[i].u0.v);
        CHECK(back.samples[i].target.v == ds.samples[i].target.v);
        CHECK(back.samples[i].T == ds.samples[i].T);
        CHECK(back.samples[i].ic.family == ds.samples[i].ic.family);
        CHECK(back.samples[i].params.to_vector() == ds.samples[i].params.to_vector());
    }
    // saving twice produces identical bytes
    const std::string path2 = "/tmp/hycop_test_dataset2.bin";
    save_dataset(ds, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    std::remove(path.c_str());
    std::remove(path2.c_str());
    CHECK_THROWS_AS((void)load_dataset("/tmp/hycop_no_such_dataset.bin"), FileFormatError);
}
