// SPDX-License-Identifier: Apache-2.0
#include "drop/analysis.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <json.hpp>

#include "drop/io.hpp"

namespace drop {

namespace {

double spectral_norm(const DenseMat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return Eigen::JacobiSVD<DenseMat>(m).singularValues()(0);
}

DenseMat eval_point(const StructuredSystem& sys, const SamplePoint& pt) {
  DenseMat h = transfer(sys, pt.sigma, as_span(pt.param));
  if (pt.right_dir && pt.left_dir) {
    DenseMat proj = pt.left_dir->cast<Cplx>().transpose() * h * pt.right_dir->cast<Cplx>();
    return proj;
  }
  return h;
}

}  // namespace

InterpolationReport verify_interpolation(const StructuredSystem& sys,
                                         const StructuredSystem& red,
                                         const SampleSet& samples, double tol) {
  InterpolationReport report;
  report.pass = true;
  for (std::size_t j = 0; j < samples.points.size(); ++j) {
    const SamplePoint& pt = samples.points[j];
    try {
      DenseMat h = eval_point(sys, pt);
      DenseMat hh = eval_point(red, pt);
      double res = spectral_norm(h - hh) / (1.0 + spectral_norm(h));
      report.residuals.push_back(res);
      report.max_residual = std::max(report.max_residual, res);
      if (!(res <= tol)) report.pass = false;
    } catch (const std::exception& e) {
      report.residuals.push_back(std::numeric_limits<double>::infinity());
      report.failures.push_back("point " + std::to_string(j) + ": " + e.what());
      report.pass = false;
    }
  }
  return report;
}

HermiteReport verify_hermite(const StructuredSystem& sys, const StructuredSystem& red,
                             const SampleSet& samples, double tol, double h_rel) {
  HermiteReport report;
  report.pass = true;
  for (std::size_t j = 0; j < samples.points.size(); ++j) {
    const SamplePoint& pt = samples.points[j];
    try {
      const double hs = h_rel * std::max(std::abs(pt.sigma), 1.0);
      SamplePoint plus = pt, minus = pt;
      plus.sigma += hs;
      minus.sigma -= hs;
      DenseMat d_sys = (eval_point(sys, plus) - eval_point(sys, minus)) / (2.0 * hs);
      DenseMat d_red = (eval_point(red, plus) - eval_point(red, minus)) / (2.0 * hs);
      double res_s = spectral_norm(d_sys - d_red) / (1.0 + spectral_norm(d_sys));
      report.residual_s.push_back(res_s);
      report.max_residual = std::max(report.max_residual, res_s);
      if (!(res_s <= tol)) report.pass = false;

      Eigen::VectorXd res_p(pt.param.size());
      for (Index k = 0; k < pt.param.size(); ++k) {
        const double hp = h_rel * std::max(std::abs(pt.param(k)), 1.0);
        SamplePoint pp = pt, pm = pt;
        pp.param(k) += hp;
        pm.param(k) -= hp;
        DenseMat g_sys = (eval_point(sys, pp) - eval_point(sys, pm)) / (2.0 * hp);
        DenseMat g_red = (eval_point(red, pp) - eval_point(red, pm)) / (2.0 * hp);
        res_p(k) = spectral_norm(g_sys - g_red) / (1.0 + spectral_norm(g_sys));
        report.max_residual = std::max(report.max_residual, res_p(k));
        if (!(res_p(k) <= tol)) report.pass = false;
      }
      report.residual_p.push_back(std::move(res_p));
    } catch (const std::exception& e) {
      report.residual_s.push_back(std::numeric_limits<double>::infinity());
      report.residual_p.emplace_back(Eigen::VectorXd::Zero(pt.param.size()));
      report.failures.push_back("point " + std::to_string(j) +
                                " (stencil too close to a pole?): " + e.what());
      report.pass = false;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

ErrorReport sweep_error(const StructuredSystem& sys, const StructuredSystem& red,
                        const std::vector<Cplx>& freqs,
                        const std::vector<Eigen::VectorXd>& params) {
  if (freqs.empty() || params.empty())
    throw std::invalid_argument("sweep_error: empty grid");
  SweepResult full = transfer_sweep(sys, freqs, params);
  SweepResult rom = transfer_sweep(red, freqs, params);

  ErrorReport report;
  report.freqs = freqs;
  report.params = params;
  const std::size_t total = freqs.size() * params.size();
  report.h_norm.assign(total, 0.0);
  report.abs_err.assign(total, 0.0);
  report.rel_err.assign(total, 0.0);
  std::vector<bool> valid(total, false);

  double h_grid_max = 0;
  for (std::size_t ip = 0; ip < params.size(); ++ip) {
    for (std::size_t iw = 0; iw < freqs.size(); ++iw) {
      const std::size_t idx = ip * freqs.size() + iw;
      if (!full.ok(iw, ip) || !rom.ok(iw, ip)) {
        std::ostringstream os;
        os << "freq " << iw << " param " << ip;
        report.missing.push_back(os.str());
        continue;
      }
      valid[idx] = true;
      report.h_norm[idx] = spectral_norm(full.values[idx]);
      report.abs_err[idx] = spectral_norm(full.values[idx] - rom.values[idx]);
      h_grid_max = std::max(h_grid_max, report.h_norm[idx]);
    }
  }
  const double eps_reg =
      std::max(h_grid_max, 1.0) * std::numeric_limits<double>::epsilon();
  double frob_sq_integral = 0;
  for (std::size_t ip = 0; ip < params.size(); ++ip) {
    double acc = 0;
    for (std::size_t iw = 0; iw < freqs.size(); ++iw) {
      const std::size_t idx = ip * freqs.size() + iw;
      if (!valid[idx]) continue;
      report.rel_err[idx] = report.abs_err[idx] / (report.h_norm[idx] + eps_reg);
      report.max_abs = std::max(report.max_abs, report.abs_err[idx]);
      report.max_rel = std::max(report.max_rel, report.rel_err[idx]);
      if (iw + 1 < freqs.size() && valid[idx + 1]) {
        const double w0 = freqs[iw].imag(), w1 = freqs[iw + 1].imag();
        const DenseMat e0 = full.values[idx] - rom.values[idx];
        const DenseMat e1 = full.values[idx + 1] - rom.values[idx + 1];
        acc += 0.5 * (w1 - w0) * (e0.squaredNorm() + e1.squaredNorm());
      }
    }
    frob_sq_integral = std::max(frob_sq_integral, acc);
  }
  report.l2_err = std::sqrt(frob_sq_integral / M_PI);
  return report;
}

void ErrorReport::write_csv(std::ostream& out, bool include_magnitude) const {
  out << (include_magnitude ? "omega,param_index,h_norm,abs_err,rel_err"
                            : "omega,param_index,abs_err,rel_err")
      << '\n';
  for (std::size_t ip = 0; ip < params.size(); ++ip) {
    for (std::size_t iw = 0; iw < freqs.size(); ++iw) {
      const std::size_t idx = ip * freqs.size() + iw;
      out << format_full(freqs[iw].imag()) << ',' << ip << ',';
      if (include_magnitude) out << format_full(h_norm[idx]) << ',';
      out << format_full(abs_err[idx]) << ',' << format_full(rel_err[idx]) << '\n';
    }
  }
}

std::string ErrorReport::summary_json() const {
  nlohmann::json j;
  j["max_abs"] = max_abs;
  j["max_rel"] = max_rel;
  j["l2_err"] = l2_err;
  j["num_freq"] = freqs.size();
  j["num_param"] = params.size();
  j["missing"] = missing;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

std::pair<int, int> loewner_rank(const DenseMat& v, const DenseMat& w,
                                 const std::vector<StructuredTerm>& k_terms) {
  if (v.cols() == 0 || w.cols() == 0) return {0, 0};
  StackedSvd ssvd = stacked_svd(v, w, k_terms);
  return {ssvd.report.rank_at(kFullRankTol), ssvd.report.rank_right_at(kFullRankTol)};
}

Eigen::MatrixXd kalman_subspace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                double rel_tol) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n)
    throw std::invalid_argument("kalman_subspace: dimension mismatch");
  Eigen::MatrixXd basis(n, 0);
  Eigen::MatrixXd last = b;
  for (Index level = 0; level < n && basis.cols() < n && last.cols() > 0; ++level) {
    Eigen::MatrixXd block = level == 0 ? b : Eigen::MatrixXd(a * last);
    Eigen::MatrixXd accepted(n, block.cols());
    Index taken = 0;
    for (Index c = 0; c < block.cols(); ++c) {
      Eigen::VectorXd z = block.col(c);
      const double norm0 = z.norm();
      if (norm0 == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) z -= basis * (basis.transpose() * z);
        if (taken > 0)
          z -= accepted.leftCols(taken) * (accepted.leftCols(taken).transpose() * z);
      }
      if (z.norm() > rel_tol * norm0) {
        accepted.col(taken++) = z / z.norm();
      }
    }
    Eigen::MatrixXd grown(n, basis.cols() + taken);
    grown << basis, accepted.leftCols(taken);
    basis = std::move(grown);
    last = accepted.leftCols(taken);
  }
  return basis;
}

namespace {

double sine_of_gap(const DenseMat& q_from, const DenseMat& q_to) {
  // largest sine of the angles needed to reach range(q_to) from
  // range(q_from): sigma_max((I - P_from) q_to)
  if (q_to.cols() == 0) return 0.0;
  if (q_from.cols() == 0) return 1.0;
  DenseMat resid = q_to - q_from * (q_from.adjoint() * q_to);
  return std::min(1.0, spectral_norm(resid));
}

}  // namespace

double max_principal_angle(const DenseMat& q1, const DenseMat& q2) {
  return std::asin(std::max(sine_of_gap(q1, q2), sine_of_gap(q2, q1)));
}

double max_principal_angle(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
  return max_principal_angle(DenseMat(q1.cast<Cplx>()), DenseMat(q2.cast<Cplx>()));
}

// ---------------------------------------------------------------------------

GramianPair gramian_quadrature(const StructuredSystem& sys,
                               const std::vector<double>& omega_grid, Index n_cap) {
  const Index n = sys.n();
  if (n > n_cap)
    throw std::invalid_argument("gramian_quadrature: n exceeds the dense cap");
  if (!sys.real_data())
    throw std::invalid_argument(
        "gramian_quadrature: real system data required (the +-i omega fold "
        "uses conjugate symmetry)");
  if (omega_grid.size() < 2)
    throw std::invalid_argument("gramian_quadrature: need at least two nodes");
  for (std::size_t k = 0; k + 1 < omega_grid.size(); ++k)
    if (!(omega_grid[k] < omega_grid[k + 1]))
      throw std::invalid_argument("gramian_quadrature: grid must be ascending");

  Eigen::MatrixXd p_acc = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd q_acc = Eigen::MatrixXd::Zero(n, n);
  const std::size_t q_nodes = omega_grid.size();
  for (std::size_t k = 0; k < q_nodes; ++k) {
    const double w_lo = k == 0 ? omega_grid[0] : omega_grid[k - 1];
    const double w_hi = k + 1 == q_nodes ? omega_grid[k] : omega_grid[k + 1];
    const double weight = 0.5 * (w_hi - w_lo);
    const Cplx s(0.0, omega_grid[k]);
    KSolver solver(sys, s, {});
    DenseMat x = solver.solve(assemble_dense(sys, Role::B, s, {}));
    DenseMat y = solver.solve_adjoint(assemble_dense(sys, Role::C, s, {}).adjoint());
    // full-line integral of a real system: conjugate-symmetric, so twice
    // the real part of the positive half; (1/2pi) * 2 = 1/pi
    p_acc += (weight / M_PI) * (x * x.adjoint()).real();
    q_acc += (weight / M_PI) * (y * y.adjoint()).real();
  }
  p_acc = 0.5 * (p_acc + p_acc.transpose()).eval();
  q_acc = 0.5 * (q_acc + q_acc.transpose()).eval();

  for (const auto* g : {&p_acc, &q_acc}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(*g, Eigen::EigenvaluesOnly);
    const double floor = -1e-10 * std::max(g->trace(), 0.0);
    if (eig.eigenvalues().minCoeff() < floor) {
      std::ostringstream os;
      os << "gramian_quadrature: indefinite Gramian (min eigenvalue "
         << eig.eigenvalues().minCoeff() << ", trace " << g->trace()
         << "); refine the frequency grid";
      throw std::runtime_error(os.str());
    }
  }
  return {std::move(p_acc), std::move(q_acc)};
}

BtResult bt_compare(const StructuredSystem& sys, int r,
                    const std::vector<double>& omega_grid, Index n_cap) {
  if (r < 1) throw std::invalid_argument("bt_compare: order must be positive");
  GramianPair g = gramian_quadrature(sys, omega_grid, n_cap);

  auto sqrt_factor = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    return Eigen::MatrixXd(eig.eigenvectors() * lam.cwiseSqrt().asDiagonal());
  };
  Eigen::MatrixXd l_p = sqrt_factor(g.p);
  Eigen::MatrixXd l_q = sqrt_factor(g.q);

  Eigen::MatrixXd cross = l_q.transpose() * l_p;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int usable = 0;
  while (usable < sv.size() && sv(usable) > 1e-12 * sv(0)) ++usable;
  const int r_use = std::min(r, usable);
  if (r_use < 1) throw std::runtime_error("bt_compare: Gramian cross product is zero");

  Eigen::VectorXd scale = sv.head(r_use).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd w_bt = l_q * svd.matrixU().leftCols(r_use) * scale.asDiagonal();
  Eigen::MatrixXd v_bt = l_p * svd.matrixV().leftCols(r_use) * scale.asDiagonal();

  auto project = [&](const std::vector<StructuredTerm>& terms, Role role) {
    std::vector<StructuredTerm> out;
    out.reserve(terms.size());
    for (const StructuredTerm& t : terms) {
      Eigen::MatrixXd m0 = t.matrix.to_dense().real();
      Eigen::MatrixXd m;
      switch (role) {
        case Role::K: m = w_bt.transpose() * m0 * v_bt; break;
        case Role::B: m = w_bt.transpose() * m0; break;
        case Role::C: m = m0 * v_bt; break;
      }
      out.push_back({t.coeff, MatrixVariant(m)});
    }
    return out;
  };
  SystemMetadata meta = sys.metadata();
  meta.name += "-bt" + std::to_string(r_use);
  StructuredSystem reduced(r_use, sys.num_inputs(), sys.num_outputs(), sys.num_params(),
                           project(sys.k_terms(), Role::K),
                           project(sys.b_terms(), Role::B),
                           project(sys.c_terms(), Role::C), std::move(meta));
  return {std::move(reduced), sv};
}

}  // namespace drop
