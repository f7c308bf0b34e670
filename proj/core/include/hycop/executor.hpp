#pragma once

#include "hycop/policy.hpp"
#include "hycop/primitives.hpp"

namespace hycop {

struct ExecOptions {
    int substep_multiplier = 1;  // 10x gives the fine re-execution for Eq-style error splits
};

/// Left-to-right composition of sub-flows: u0 -> Phi_(j_k,tau_k) o ... o
/// Phi_(j_1,tau_1) (u0).  After every step the state must stay finite and
/// bounded; otherwise ExecutionDiverged carries the step index.
Field execute(const std::vector<PrimitiveSpec>& dict, const PdeParams& params, const Field& u0,
              const Program& program, const ExecOptions& opts = {});

/// Allocation semantics for decoded (Normalized-mode) programs: the program's
/// durations are shares of the query horizon -- they say how the horizon is
/// scheduled across processes, not how far each sub-flow integrates.  At
/// execution time every selected primitive must cover the full horizon, so
/// each step's duration is rescaled by T / (total allocation of its
/// primitive): per primitive the executed durations sum to exactly T, while
/// the allocation weights set the interleaving granularity.  (A program
/// [(0, T/2), (1, T/2)] therefore executes as [(0, T), (1, T)].)  Free-mode
/// programs are physical durations and are never expanded.
Program expand_allocations(const Program& program, double T);

/// Independent decode+execute per horizon: each requested time gets its own
/// program conditioned on (features(u0, t)), always starting from u0.
/// Normalized-mode policies execute their expanded allocations.
std::vector<Field> execute_multi_time(const Policy& policy,
                                      const std::vector<PrimitiveSpec>& dict,
                                      const PdeParams& params, const Field& u0,
                                      const std::vector<double>& times);

/// Strang baseline with standard splitting semantics (every sub-flow advances
/// its full substep duration, unlike the allocation semantics of decoded
/// programs): n=2 gives (A_{h/2} B_h A_{h/2})^N, n=3 the palindrome
/// (A_{h/2} B_{h/2} C_h B_{h/2} A_{h/2})^N.
Program strang_schedule(int dict_size, double T, int substeps);

}  // namespace hycop
