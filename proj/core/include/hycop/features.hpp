#pragma once

#include "hycop/systems.hpp"

namespace hycop {

enum class FeatureMode { Dimensionless, RawIc };

/// Dimensionless regime descriptors.  Each system gets a fixed-length vector
/// whose final entry is always the query horizon T:
///   AD1D    (4): log(1+Pe), CoV(u0), CoV(du0/dx), T
///   Burgers (4): log(1+Re), max|du0/dx|, max|u0|, T
///   SWE1D   (4): max Froude, CoV(h), CoV(hu), T
///   ADR2D   (7): log(1+Pe_x), log(1+Pe_y), log(1+Da), CoV(u0), CoV(du0/dx), CoV(du0/dy), T
///   KS1D    (4): W, CoV(u0), spectral centroid of u0, T
/// where CoV(f) = Var(f) / (mean|f| + 1e-8)^2 and the Peclet/Reynolds/
/// Damkohler groups are log-compressed.  All entries are resolution-
/// consistent: recomputing on a refined grid moves them only at the
/// discretization level of u0 itself.
std::vector<double> extract_features(SystemTag system, const PdeParams& params,
                                     const Field& u0, double T);

/// Ablation comparator: every channel of u0 flattened, plus T.
std::vector<double> raw_ic_features(const Field& u0, double T);

int feature_dim(SystemTag system, FeatureMode mode, int grid_total, int channels);

/// Stable identifier of the feature formulas, recorded in checkpoints.
std::string feature_formula_id(SystemTag system, FeatureMode mode);

}  // namespace hycop
