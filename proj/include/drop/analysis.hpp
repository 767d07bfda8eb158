// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drop/reduction.hpp"
#include "drop/sampling.hpp"
#include "drop/system.hpp"

namespace drop {

// ---------------------------------------------------------------------------
// Interpolation / Hermite verification

struct InterpolationReport {
  std::vector<double> residuals;  // per point: ||H-Hh|| / (1 + ||H||)
  std::vector<std::string> failures;
  bool pass = false;
  double max_residual = 0;
};

/// Check the interpolation conditions at the sample points. With
/// tangential directions the tangentially projected values c^T H b are
/// compared. Meaningful as a pass/fail gate only for untruncated
/// reductions; informational otherwise.
InterpolationReport verify_interpolation(const StructuredSystem& sys,
                                         const StructuredSystem& red,
                                         const SampleSet& samples, double tol);

struct HermiteReport {
  std::vector<double> residual_s;               // d/ds mismatch per point
  std::vector<Eigen::VectorXd> residual_p;      // per point, per parameter
  std::vector<std::string> failures;
  bool pass = false;
  double max_residual = 0;
};

/// Central finite-difference comparison of d/ds and the parameter gradient
/// at coincident sample points. Step h_rel * max(|sigma|, 1) with an
/// O(h^2) stencil, so pass tolerances below ~1e-5 are not meaningful for
/// h_rel = 1e-4.
HermiteReport verify_hermite(const StructuredSystem& sys, const StructuredSystem& red,
                             const SampleSet& samples, double tol,
                             double h_rel = 1e-4);

// ---------------------------------------------------------------------------
// Frequency-sweep error report

struct ErrorReport {
  std::vector<Cplx> freqs;
  std::vector<Eigen::VectorXd> params;
  // grid arrays indexed [i_param * freqs.size() + i_freq]
  std::vector<double> h_norm;   // ||H||_2 per point (spectral norm)
  std::vector<double> abs_err;  // ||H - Hh||_2
  std::vector<double> rel_err;  // abs / (||H|| + eps regularizer)
  std::vector<std::string> missing;  // failed points
  double max_abs = 0;
  double max_rel = 0;
  double l2_err = 0;  // grid-quadrature frequency-domain error norm

  /// CSV columns: omega, param_index, abs_err, rel_err (the module
  /// interface); include_magnitude additionally emits h_norm.
  void write_csv(std::ostream& out, bool include_magnitude = false) const;
  std::string summary_json() const;
};

ErrorReport sweep_error(const StructuredSystem& sys, const StructuredSystem& red,
                        const std::vector<Cplx>& freqs,
                        const std::vector<Eigen::VectorXd>& params);

// ---------------------------------------------------------------------------
// Rank and subspace diagnostics

/// Numerical ranks (tolerance 1e-10 * sigma_max) of the row and column
/// stacks of the projected blocks. For a first-order system K(s) = sI - A
/// the term list {I, A} makes the row block [W^T V, W^T A V].
std::pair<int, int> loewner_rank(const DenseMat& v, const DenseMat& w,
                                 const std::vector<StructuredTerm>& k_terms);

/// Orthonormal basis of range [B, AB, ..., A^{n-1}B] via incremental
/// orthogonalization (never forms the raw power stack).
Eigen::MatrixXd kalman_subspace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                double rel_tol = 1e-10);

/// Largest principal angle between the ranges of two orthonormal bases,
/// computed from sines (robust near zero angle).
double max_principal_angle(const DenseMat& q1, const DenseMat& q2);
double max_principal_angle(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2);

// ---------------------------------------------------------------------------
// Quadrature Gramians and balanced-truncation comparison (diagnostic only;
// dense n x n storage, capped by default at n <= 600)

struct GramianPair {
  Eigen::MatrixXd p;  // reachability Gramian estimate
  Eigen::MatrixXd q;  // observability Gramian estimate
};

/// Frequency-quadrature Gramians
///   P ~ (1/2pi) int K(iw)^{-1} B(iw) B(iw)^* K(iw)^{-*} dw
///   Q ~ (1/2pi) int K(iw)^{-*} C(iw)^* C(iw) K(iw)^{-1} dw
/// by composite trapezoid over the grid, with the symmetric -iw
/// contributions folded in. Requires real system data (the fold uses
/// conjugate symmetry). Throws when n exceeds the cap or a Gramian comes
/// out indefinite beyond tolerance.
GramianPair gramian_quadrature(const StructuredSystem& sys,
                               const std::vector<double>& omega_grid,
                               Index n_cap = 600);

struct BtResult {
  StructuredSystem reduced;
  Eigen::VectorXd hankel_sv;
};

/// Square-root balanced truncation on the quadrature Gramians: factor P
/// and Q, SVD of the cross product of the factors, project all structured
/// terms. A comparison baseline, not a production reduction path.
BtResult bt_compare(const StructuredSystem& sys, int r,
                    const std::vector<double>& omega_grid, Index n_cap = 600);

}  // namespace drop
