// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drop/projection.hpp"
#include "drop/system.hpp"

namespace drop {

/// Singular values of the stacked projected blocks
///     [W^T A_1 V ... W^T A_l V]   (row block, sv_left)
///     [W^T A_1 V; ...; W^T A_l V] (column block, sv_right)
/// together with the chosen reduced order. In exact arithmetic the two
/// lists have equal rank (the rank of the block pair); runs record both so
/// they are self-describing when the numerical ranks disagree.
struct SvdReport {
  Eigen::VectorXd sv_left;   // descending
  Eigen::VectorXd sv_right;  // descending
  std::map<double, int> numerical_rank_at;  // tol -> rank on sv_left
  int chosen_r = 0;
  enum class Mode { FixedOrder, RelTol } truncation_mode = Mode::FixedOrder;
  double rel_tol = 0;
  int fixed_r = 0;
  bool orthonormalized_bases = false;
  bool realified_bases = false;
  std::vector<std::string> warnings;

  /// Count of sv_left entries with sv/sv_max > tol.
  int rank_at(double tol) const;
  int rank_right_at(double tol) const;
};

/// Compact-SVD factors from the stacked blocks: w1 holds the left singular
/// vectors of the row block, v1 the right singular vectors of the column
/// block.
struct StackedSvd {
  SvdReport report;
  DenseMat w1;  // cols(W) x k
  DenseMat v1;  // cols(V) x k
};

StackedSvd stacked_svd(const DenseMat& v, const DenseMat& w,
                       const std::vector<StructuredTerm>& k_terms);

struct TruncationPolicy {
  SvdReport::Mode mode = SvdReport::Mode::RelTol;
  int fixed_r = 0;
  double rel_tol = 1e-8;

  static TruncationPolicy fixed(int r);
  static TruncationPolicy relative(double tau);
};

/// Reduced order from the report: fixed mode clamps to the available rank,
/// relative mode counts sv_left entries above tau * sv_max (recording the
/// sv_right count in the report when it differs).
int choose_order(SvdReport& report, const TruncationPolicy& policy);

enum class ProjectionSide { TwoSided, OneSided };

struct ReduceResult {
  StructuredSystem reduced;
  SvdReport report;
  DenseMat v_p, w_p;  // truncated projection matrices (n x r)
  std::vector<std::string> warnings;
};

/// DROP reduction: stacked SVDs of the projected blocks, truncation at the
/// chosen order, then Petrov-Galerkin projection V_p = V V1(:,1:r),
/// W_p = W W1(:,1:r). The reduced system keeps the parent's coefficient
/// expressions; projected matrices are stored dense. One-sided projection
/// ignores the W argument: the stacks are built with W := V and
/// W_p := V_p.
ReduceResult drop_reduce(const StructuredSystem& sys, const ProjectionPair& pair,
                         const TruncationPolicy& policy,
                         ProjectionSide side = ProjectionSide::TwoSided);
ReduceResult drop_reduce(const StructuredSystem& sys, const DenseMat& v,
                         const DenseMat& w, const TruncationPolicy& policy,
                         ProjectionSide side = ProjectionSide::TwoSided);

/// Numerical-rank tolerance used for "untruncated" reductions and the rank
/// diagnostics.
inline constexpr double kFullRankTol = 1e-10;

/// Reduction at the full numerical rank of the stacked SVDs. When V and W
/// span the full reachable/observable subspaces the result realizes the
/// original transfer function exactly.
ReduceResult minimal_realization(const StructuredSystem& sys, const ProjectionPair& pair);
ReduceResult minimal_realization(const StructuredSystem& sys, const DenseMat& v,
                                 const DenseMat& w);

}  // namespace drop
