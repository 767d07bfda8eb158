// SPDX-License-Identifier: Apache-2.0
#include "drop/system.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

namespace drop {

namespace {

constexpr double kRcondFloor = 100.0 * std::numeric_limits<double>::epsilon();

const char* role_name(Role role) {
  switch (role) {
    case Role::K: return "K";
    case Role::B: return "B";
    default: return "C";
  }
}

std::string point_string(Cplx s, std::span<const double> p) {
  std::ostringstream os;
  os << "s=(" << s.real() << "," << s.imag() << ")";
  if (!p.empty()) {
    os << ", p=(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << ")";
  }
  return os.str();
}

}  // namespace

SingularSystemError::SingularSystemError(Cplx s, const Eigen::VectorXd& p, double rcond)
    : std::runtime_error("K(s,p) numerically singular at " +
                         point_string(s, {p.data(), static_cast<std::size_t>(p.size())}) +
                         " (rcond estimate " + std::to_string(rcond) + ")"),
      s_(s),
      p_(p),
      rcond_(rcond) {}

StructuredSystem::StructuredSystem(Index n, Index m, Index p, Index d,
                                   std::vector<StructuredTerm> k_terms,
                                   std::vector<StructuredTerm> b_terms,
                                   std::vector<StructuredTerm> c_terms,
                                   SystemMetadata metadata)
    : n_(n),
      m_(m),
      p_(p),
      d_(d),
      k_terms_(std::move(k_terms)),
      b_terms_(std::move(b_terms)),
      c_terms_(std::move(c_terms)),
      metadata_(std::move(metadata)) {
  if (n_ < 1 || m_ < 1 || p_ < 1 || d_ < 0)
    throw std::invalid_argument("system dimensions must be positive (d may be 0)");
  if (k_terms_.empty()) throw std::invalid_argument("K needs at least one term");
  if (b_terms_.empty() || c_terms_.empty())
    throw std::invalid_argument("B and C need at least one term each");

  auto check = [&](const std::vector<StructuredTerm>& terms, Role role, Index rows,
                   Index cols) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const StructuredTerm& t = terms[i];
      if (t.matrix.rows() != rows || t.matrix.cols() != cols) {
        std::ostringstream os;
        os << role_name(role) << "-term " << i << ": matrix is " << t.matrix.rows()
           << "x" << t.matrix.cols() << ", expected " << rows << "x" << cols;
        throw std::invalid_argument(os.str());
      }
      if (t.coeff.max_param_index() > d_) {
        std::ostringstream os;
        os << role_name(role) << "-term " << i << ": coefficient uses p"
           << t.coeff.max_param_index() << " but the system declares d=" << d_;
        throw std::invalid_argument(os.str());
      }
    }
  };
  check(k_terms_, Role::K, n_, n_);
  check(b_terms_, Role::B, n_, m_);
  check(c_terms_, Role::C, p_, n_);
  if (!metadata_.param_box.empty() &&
      static_cast<Index>(metadata_.param_box.size()) != d_)
    throw std::invalid_argument("parameter box size does not match d");

  real_data_ = true;
  for (const auto* terms : {&k_terms_, &b_terms_, &c_terms_})
    for (const auto& t : *terms)
      if (!t.matrix.is_real()) real_data_ = false;
}

const std::vector<StructuredTerm>& StructuredSystem::terms(Role role) const {
  switch (role) {
    case Role::K: return k_terms_;
    case Role::B: return b_terms_;
    default: return c_terms_;
  }
}

MatrixVariant assemble(const StructuredSystem& sys, Role role, Cplx s,
                       std::span<const double> p) {
  const std::vector<StructuredTerm>& terms = sys.terms(role);
  std::vector<Cplx> coeffs(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    try {
      coeffs[i] = terms[i].coeff.eval(s, p);
    } catch (const EvalError& e) {
      throw EvalError(std::string(role_name(role)) + "-term " + std::to_string(i) +
                      " ('" + terms[i].coeff.to_string() + "') at " +
                      point_string(s, p) + ": " + e.what());
    }
  }

  bool all_sparse = true;
  for (const auto& t : terms)
    if (!t.matrix.is_sparse()) all_sparse = false;

  if (all_sparse) {
    SparseMat acc = coeffs[0] * terms[0].matrix.sparse();
    for (std::size_t i = 1; i < terms.size(); ++i)
      acc = acc + SparseMat(coeffs[i] * terms[i].matrix.sparse());
    return MatrixVariant(std::move(acc));
  }
  DenseMat acc = coeffs[0] * terms[0].matrix.to_dense();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].matrix.is_sparse())
      acc += coeffs[i] * terms[i].matrix.sparse();
    else
      acc += coeffs[i] * terms[i].matrix.dense();
  }
  return MatrixVariant(std::move(acc));
}

DenseMat assemble_dense(const StructuredSystem& sys, Role role, Cplx s,
                        std::span<const double> p) {
  return assemble(sys, role, s, p).to_dense();
}

// ---------------------------------------------------------------------------
// KSolver

struct KSolver::Impl {
  bool sparse = false;
  Eigen::PartialPivLU<DenseMat> dense_lu;
  Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> sparse_lu;
  double rcond = 0;
};

namespace {

double sparse_norm1(const SparseMat& m) {
  double best = 0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double col = 0;
    for (SparseMat::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

// Hager-style 1-norm estimate of K^{-1} from a ready factorization.
template <typename Solve, typename SolveAdj>
double inverse_norm1_estimate(Index n, Solve&& solve, SolveAdj&& solve_adj) {
  DenseMat x = DenseMat::Constant(n, 1, Cplx(1.0 / static_cast<double>(n), 0));
  double est = 0;
  Index last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    DenseMat y = solve(x);
    double norm_y = y.cwiseAbs().sum();
    if (iter > 0 && norm_y <= est) break;
    est = norm_y;
    DenseMat xi(n, 1);
    for (Index i = 0; i < n; ++i) {
      double a = std::abs(y(i, 0));
      xi(i, 0) = a == 0 ? Cplx(1, 0) : y(i, 0) / a;
    }
    DenseMat z = solve_adj(xi);
    Index j = 0;
    z.cwiseAbs().col(0).maxCoeff(&j);
    if (j == last) break;
    last = j;
    x.setZero();
    x(j, 0) = Cplx(1, 0);
  }
  return est;
}

}  // namespace

KSolver::KSolver(const StructuredSystem& sys, Cplx s, std::span<const double> p)
    : impl_(std::make_unique<Impl>()) {
  MatrixVariant k = assemble(sys, Role::K, s, p);
  Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
  if (k.is_sparse()) {
    impl_->sparse = true;
    SparseMat ks = k.sparse();
    ks.makeCompressed();
    impl_->sparse_lu.compute(ks);
    if (impl_->sparse_lu.info() != Eigen::Success)
      throw SingularSystemError(s, pv, 0.0);
    double inv_norm = inverse_norm1_estimate(
        ks.rows(),
        [&](const DenseMat& rhs) { return DenseMat(impl_->sparse_lu.solve(rhs)); },
        [&](const DenseMat& rhs) {
          return DenseMat(impl_->sparse_lu.adjoint().solve(rhs));
        });
    double norm = sparse_norm1(ks);
    impl_->rcond = (norm > 0 && inv_norm > 0) ? 1.0 / (norm * inv_norm) : 0.0;
  } else {
    impl_->dense_lu.compute(k.dense());
    impl_->rcond = impl_->dense_lu.rcond();
  }
  if (!(impl_->rcond > kRcondFloor)) throw SingularSystemError(s, pv, impl_->rcond);
}

KSolver::~KSolver() = default;
KSolver::KSolver(KSolver&&) noexcept = default;
KSolver& KSolver::operator=(KSolver&&) noexcept = default;

DenseMat KSolver::solve(const DenseMat& rhs) const {
  return impl_->sparse ? DenseMat(impl_->sparse_lu.solve(rhs))
                       : DenseMat(impl_->dense_lu.solve(rhs));
}

DenseMat KSolver::solve_transposed(const DenseMat& rhs) const {
  return impl_->sparse ? DenseMat(impl_->sparse_lu.transpose().solve(rhs))
                       : DenseMat(impl_->dense_lu.transpose().solve(rhs));
}

DenseMat KSolver::solve_adjoint(const DenseMat& rhs) const {
  return impl_->sparse ? DenseMat(impl_->sparse_lu.adjoint().solve(rhs))
                       : DenseMat(impl_->dense_lu.adjoint().solve(rhs));
}

double KSolver::rcond() const { return impl_->rcond; }

// ---------------------------------------------------------------------------

DenseMat transfer(const StructuredSystem& sys, Cplx s, std::span<const double> p) {
  KSolver k(sys, s, p);
  DenseMat x = k.solve(assemble_dense(sys, Role::B, s, p));
  MatrixVariant c = assemble(sys, Role::C, s, p);
  return c.is_sparse() ? DenseMat(c.sparse() * x) : DenseMat(c.dense() * x);
}

DenseMat transfer(const StructuredSystem& sys, Cplx s, const Eigen::VectorXd& p) {
  return transfer(sys, s, as_span(p));
}

SweepResult transfer_sweep(const StructuredSystem& sys, const std::vector<Cplx>& freqs,
                           const std::vector<Eigen::VectorXd>& params) {
  SweepResult result;
  result.freqs = freqs;
  result.params = params;
  result.values.resize(freqs.size() * params.size());
  for (std::size_t ip = 0; ip < params.size(); ++ip) {
    for (std::size_t iw = 0; iw < freqs.size(); ++iw) {
      try {
        result.values[ip * freqs.size() + iw] =
            transfer(sys, freqs[iw], as_span(params[ip]));
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "point (freq " << iw << ", param " << ip << "): " << e.what();
        result.failures.push_back(os.str());
      }
    }
  }
  return result;
}

}  // namespace drop
