// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drop/sampling.hpp"
#include "drop/system.hpp"

namespace drop {

struct BuildOptions {
  enum class OnSingular { Skip, Throw };
  /// Points where K is singular are dropped with a warning by default;
  /// random parameter draws may land near poles.
  OnSingular on_singular = OnSingular::Skip;
};

struct BuildResult {
  DenseMat matrix;                 // n x (#columns actually built)
  std::vector<int> used_points;    // indices into the sample set
  std::vector<std::string> warnings;
};

/// Columns K(sigma_j, p_j)^{-1} B(sigma_j, p_j) (times the right direction
/// when present), one factorization per sample point.
BuildResult build_v(const StructuredSystem& sys, const SampleSet& samples,
                    const BuildOptions& opts = {});

/// Columns from the transposed solves K(sigma_j, p_j)^{-T} C(sigma_j,
/// p_j)^T (times the left direction when present). Plain transpose, not
/// conjugate transpose; for real system matrices with the realified
/// pipeline the resulting subspace is unaffected by the distinction.
BuildResult build_w(const StructuredSystem& sys, const SampleSet& samples,
                    const BuildOptions& opts = {});

/// Rank-revealing orthonormal basis of range(M): columns whose singular
/// value falls below rel_drop_tol * sigma_max are discarded.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m, double rel_drop_tol);
DenseMat orthonormalize(const DenseMat& m, double rel_drop_tol);

/// Orthonormal real basis of span_R [Re M, Im M]; at most 2x the input
/// column count. Valid as a projection basis for real-data systems.
Eigen::MatrixXd realify(const DenseMat& m, double rel_drop_tol = 1e-12);

/// The projection matrices V, W with processing flags and provenance.
struct ProjectionPair {
  DenseMat v, w;  // realified bases carry a zero imaginary part
  bool orthonormalized = false;
  bool realified = false;
  std::uint64_t sample_seed = 0;
  std::vector<std::string> warnings;
};

/// Default pipeline: build the raw bases and, for real-data systems,
/// stack real and imaginary parts into a real matrix ([Re V, Im V],
/// without orthonormalization). The raw column scaling is what the
/// stacked-SVD step ranks: snapshots with little energy are exactly the
/// weakly reachable/observable directions, and orthonormalizing the
/// bases first would erase that grading (catastrophically so once the
/// basis saturates to full rank). Orthonormalized bases remain available
/// through orthonormalize()/realify() and are flagged when used.
ProjectionPair build_projection(const StructuredSystem& sys, const SampleSet& samples,
                                const BuildOptions& opts = {});

}  // namespace drop
