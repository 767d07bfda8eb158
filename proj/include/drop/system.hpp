// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drop/expr.hpp"
#include "drop/types.hpp"

namespace drop {

/// One summand of a matrix-valued function: a scalar coefficient of (s, p)
/// times a constant matrix.
struct StructuredTerm {
  CoeffExpr coeff;
  MatrixVariant matrix;
};

enum class Role { K, B, C };

struct SystemMetadata {
  std::string name = "system";
  double freq_min = 1e-2;
  double freq_max = 1e2;
  std::vector<std::array<double, 2>> param_box;  // size d
};

/// Raised when K(s, p) is numerically singular at a requested point. The
/// caller is expected to perturb the sample point. Condition threshold:
/// reciprocal condition estimate below 100 * machine epsilon.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(Cplx s, const Eigen::VectorXd& p, double rcond);
  Cplx s() const { return s_; }
  const Eigen::VectorXd& p() const { return p_; }
  double rcond() const { return rcond_; }

 private:
  Cplx s_;
  Eigen::VectorXd p_;
  double rcond_;
};

/// A transfer function C(s,p) K(s,p)^{-1} B(s,p) where each matrix
/// function is a sum of coefficient-times-constant-matrix terms. Immutable
/// after construction; evaluation functions are pure.
class StructuredSystem {
 public:
  StructuredSystem(Index n, Index m, Index p, Index d,
                   std::vector<StructuredTerm> k_terms,
                   std::vector<StructuredTerm> b_terms,
                   std::vector<StructuredTerm> c_terms,
                   SystemMetadata metadata = {});

  Index n() const { return n_; }
  Index num_inputs() const { return m_; }
  Index num_outputs() const { return p_; }
  Index num_params() const { return d_; }

  const std::vector<StructuredTerm>& k_terms() const { return k_terms_; }
  const std::vector<StructuredTerm>& b_terms() const { return b_terms_; }
  const std::vector<StructuredTerm>& c_terms() const { return c_terms_; }
  const std::vector<StructuredTerm>& terms(Role role) const;

  const SystemMetadata& metadata() const { return metadata_; }

  /// True when every constant matrix is real-valued.
  bool real_data() const { return real_data_; }

 private:
  Index n_, m_, p_, d_;
  std::vector<StructuredTerm> k_terms_, b_terms_, c_terms_;
  SystemMetadata metadata_;
  bool real_data_;
};

/// Evaluate sum_i coeff_i(s,p) * M_i for the requested role. The result is
/// sparse iff every term of the role is sparse. Coefficient evaluation
/// errors are rethrown with the term index attached.
MatrixVariant assemble(const StructuredSystem& sys, Role role, Cplx s,
                       std::span<const double> p);
DenseMat assemble_dense(const StructuredSystem& sys, Role role, Cplx s,
                        std::span<const double> p);

/// Factorization of K(s,p), reusable across right-hand sides. Uses a
/// pivoted LU (dense) or sparse LU; the constructor throws
/// SingularSystemError when the condition estimate exceeds
/// 1 / (100 * machine epsilon).
class KSolver {
 public:
  KSolver(const StructuredSystem& sys, Cplx s, std::span<const double> p);
  ~KSolver();
  KSolver(KSolver&&) noexcept;
  KSolver& operator=(KSolver&&) noexcept;

  DenseMat solve(const DenseMat& rhs) const;             // K x = rhs
  DenseMat solve_transposed(const DenseMat& rhs) const;  // K^T x = rhs
  DenseMat solve_adjoint(const DenseMat& rhs) const;     // K^H x = rhs
  double rcond() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// H(s,p) = C(s,p) K(s,p)^{-1} B(s,p), solved column by column (the
/// inverse is never formed). Sparse factorization when K is sparse.
DenseMat transfer(const StructuredSystem& sys, Cplx s, std::span<const double> p = {});
DenseMat transfer(const StructuredSystem& sys, Cplx s, const Eigen::VectorXd& p);

/// Batch transfer evaluation over a frequency list and a parameter list.
/// Output ordering is deterministic: index = i_param * freqs.size() +
/// i_freq. Per-point failures are recorded and the sweep continues.
struct SweepResult {
  std::vector<Cplx> freqs;
  std::vector<Eigen::VectorXd> params;
  std::vector<DenseMat> values;       // empty matrix where the solve failed
  std::vector<std::string> failures;  // human-readable, one per failed point

  const DenseMat& at(std::size_t i_freq, std::size_t i_param) const {
    return values[i_param * freqs.size() + i_freq];
  }
  bool ok(std::size_t i_freq, std::size_t i_param) const {
    return at(i_freq, i_param).size() > 0;
  }
};

SweepResult transfer_sweep(const StructuredSystem& sys, const std::vector<Cplx>& freqs,
                           const std::vector<Eigen::VectorXd>& params);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace drop
