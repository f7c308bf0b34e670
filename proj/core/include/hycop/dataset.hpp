#pragma once

#include <array>
#include <cstdint>

#include "hycop/reference.hpp"
#include "hycop/systems.hpp"

namespace hycop {

/// Analytic description of a sampled initial condition: family index plus a
/// fixed-size parameter block.  ICs can be re-evaluated on any grid (this is
/// what makes zero-shot resolution transfer possible).
constexpr int kIcParamSlots = 12;
struct IcDescriptor {
    int family = 0;
    std::array<double, kIcParamSlots> p{};
};

enum class Split { Train = 0, TestId = 1, TestOod = 2 };

struct BenchmarkSpec {
    SystemTag system = SystemTag::AD1D;
    int resolution = 64;  // per axis
    int n_train = 2000;
    int n_test_id = 200;
    int n_test_ood = 200;
    std::uint64_t seed = 42;
};

BenchmarkSpec default_benchmark_spec(SystemTag system);

struct Sample {
    PdeParams params;
    IcDescriptor ic;
    double T = 0.0;
    Field u0;
    Field target;
    int split = 0;
};

struct Dataset {
    BenchmarkSpec spec;
    std::vector<Sample> samples;  // ordered train, then ID, then OOD
    int resample_count = 0;       // reference-diverged draws that were redrawn

    std::vector<int> split_indices(Split s) const;
};

/// Number of IC families for a system (ID list; OOD draws reuse the same
/// families with extrapolated hyperparameters).  Family kWallDamBreak is the
/// special wall-bounded dam-break family used by the boundary-swap transfer.
int ic_family_count(SystemTag system);
constexpr int kWallDamBreak = 100;

/// Deterministic per-(family, seed) analytic IC draw + evaluation on the
/// given grid.  Throws UnknownIcFamily for out-of-range families.
IcDescriptor sample_ic_descriptor(SystemTag system, int family, std::uint64_t seed, bool ood);
Field build_ic(SystemTag system, const IcDescriptor& ic, const Grid& grid);
Field sample_ic(SystemTag system, int family, std::uint64_t seed);

/// Parameter/time draws per split (ID ranges for train and test-ID,
/// extrapolation unions just outside them for OOD).
PdeParams sample_params(SystemTag system, std::uint64_t seed, bool ood);
double sample_horizon(SystemTag system, std::uint64_t seed, Split split, bool ood);
double eval_horizon(SystemTag system);  // fixed eval T (KS horizons are sampled)

/// Generates all splits with reference targets (parallel across samples;
/// ReferenceDiverged draws are redrawn with a fresh sub-seed and counted).
Dataset build_dataset(const BenchmarkSpec& spec);

/// Structured-text JSON-like header (system, counts, seed, format version,
/// record layout with byte offsets) followed by fixed-width little-endian
/// float64 records: params, ic descriptor, T, u0 values, target values.
/// Byte-reproducible for a fixed (spec, seed).
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace hycop
