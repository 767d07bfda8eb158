// SPDX-License-Identifier: Apache-2.0
#include "drop/reduction.hpp"

#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace drop {

namespace {

int count_above(const Eigen::VectorXd& sv, double tol) {
  if (sv.size() == 0) return 0;
  double smax = sv(0);
  if (smax <= 0.0) return 0;
  int r = 0;
  while (r < sv.size() && sv(r) > tol * smax) ++r;
  return r;
}

DenseMat projected_block(const MatrixVariant& a, const DenseMat& v, const DenseMat& w) {
  DenseMat av = a.is_sparse() ? DenseMat(a.sparse() * v) : DenseMat(a.dense() * v);
  return w.transpose() * av;  // plain transpose throughout
}

}  // namespace

int SvdReport::rank_at(double tol) const { return count_above(sv_left, tol); }
int SvdReport::rank_right_at(double tol) const { return count_above(sv_right, tol); }

StackedSvd stacked_svd(const DenseMat& v, const DenseMat& w,
                       const std::vector<StructuredTerm>& k_terms) {
  if (k_terms.empty()) throw std::invalid_argument("stacked_svd: no K terms");
  const Index n = k_terms[0].matrix.rows();
  if (v.rows() != n || w.rows() != n)
    throw std::invalid_argument("stacked_svd: V/W row count does not match the A_i");

  StackedSvd out;
  const Index cv = v.cols(), cw = w.cols();
  const Index l = static_cast<Index>(k_terms.size());
  if (cv == 0 || cw == 0) {
    out.w1.resize(cw, 0);
    out.v1.resize(cv, 0);
    return out;
  }

  DenseMat row_block(cw, l * cv);
  DenseMat col_block(l * cw, cv);
  for (Index i = 0; i < l; ++i) {
    DenseMat t = projected_block(k_terms[i].matrix, v, w);
    row_block.middleCols(i * cv, cv) = t;
    col_block.middleRows(i * cw, cw) = t;
  }

  Eigen::BDCSVD<DenseMat> svd_row(row_block, Eigen::ComputeThinU);
  Eigen::BDCSVD<DenseMat> svd_col(col_block, Eigen::ComputeThinV);
  out.w1 = svd_row.matrixU();
  out.v1 = svd_col.matrixV();
  out.report.sv_left = svd_row.singularValues();
  out.report.sv_right = svd_col.singularValues();
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12})
    out.report.numerical_rank_at[tol] = out.report.rank_at(tol);
  return out;
}

TruncationPolicy TruncationPolicy::fixed(int r) {
  if (r <= 0) throw std::invalid_argument("fixed order must be positive");
  TruncationPolicy p;
  p.mode = SvdReport::Mode::FixedOrder;
  p.fixed_r = r;
  return p;
}

TruncationPolicy TruncationPolicy::relative(double tau) {
  if (!(tau > 0.0) || !(tau < 1.0))
    throw std::invalid_argument("relative tolerance must lie in (0, 1)");
  TruncationPolicy p;
  p.mode = SvdReport::Mode::RelTol;
  p.rel_tol = tau;
  return p;
}

int choose_order(SvdReport& report, const TruncationPolicy& policy) {
  report.truncation_mode = policy.mode;
  report.rel_tol = policy.rel_tol;
  report.fixed_r = policy.fixed_r;
  const int available =
      std::min(count_above(report.sv_left, 0.0), count_above(report.sv_right, 0.0));
  int r;
  if (policy.mode == SvdReport::Mode::FixedOrder) {
    if (policy.fixed_r <= 0) throw std::invalid_argument("fixed order must be positive");
    r = std::min(policy.fixed_r, available);
    if (r < policy.fixed_r) {
      std::ostringstream os;
      os << "requested order " << policy.fixed_r << " clamped to available rank " << r;
      report.warnings.push_back(os.str());
    }
  } else {
    if (!(policy.rel_tol > 0.0) || !(policy.rel_tol < 1.0))
      throw std::invalid_argument("relative tolerance must lie in (0, 1)");
    r = count_above(report.sv_left, policy.rel_tol);
    int r_right = count_above(report.sv_right, policy.rel_tol);
    if (r_right != r) {
      std::ostringstream os;
      os << "row/column stack ranks differ at tol " << policy.rel_tol << ": " << r
         << " vs " << r_right << "; using the smaller";
      report.warnings.push_back(os.str());
      r = std::min(r, r_right);
    }
    r = std::min(r, available);
  }
  report.chosen_r = r;
  return r;
}

namespace {

ReduceResult reduce_with(const StructuredSystem& sys, const DenseMat& v,
                         const DenseMat& w, const TruncationPolicy& policy,
                         ProjectionSide side, bool orthonormalized, bool realified,
                         std::uint64_t probe_seed) {
  const DenseMat& w_build = side == ProjectionSide::OneSided ? v : w;
  StackedSvd ssvd = stacked_svd(v, w_build, sys.k_terms());
  ssvd.report.orthonormalized_bases = orthonormalized;
  ssvd.report.realified_bases = realified;
  int r = choose_order(ssvd.report, policy);
  if (r < 1)
    throw std::runtime_error("reduction produced order 0: projected stacks are zero");

  DenseMat v_p = v * ssvd.v1.leftCols(r);
  DenseMat w_p = side == ProjectionSide::OneSided ? v_p : DenseMat(w_build * ssvd.w1.leftCols(r));

  auto project = [&](const std::vector<StructuredTerm>& terms, Role role) {
    std::vector<StructuredTerm> out;
    out.reserve(terms.size());
    for (const StructuredTerm& t : terms) {
      DenseMat m;
      switch (role) {
        case Role::K:
          m = projected_block(t.matrix, v_p, w_p);
          break;
        case Role::B:
          m = w_p.transpose() * t.matrix.to_dense();
          break;
        case Role::C:
          m = t.matrix.to_dense() * v_p;
          break;
      }
      // realified bases keep real system data real
      if (realified && t.matrix.is_real()) m = m.real().cast<Cplx>();
      out.push_back({t.coeff, MatrixVariant(std::move(m))});
    }
    return out;
  };

  SystemMetadata meta = sys.metadata();
  meta.name += "-r" + std::to_string(r);
  StructuredSystem reduced(r, sys.num_inputs(), sys.num_outputs(), sys.num_params(),
                           project(sys.k_terms(), Role::K),
                           project(sys.b_terms(), Role::B),
                           project(sys.c_terms(), Role::C), std::move(meta));

  ReduceResult result{std::move(reduced), std::move(ssvd.report), std::move(v_p),
                      std::move(w_p), {}};

  // probe the reduced K at a few grid points; singularity is a warning,
  // not a failure
  Rng rng(Rng::derive_seed(probe_seed, 0x9e0be));
  const SystemMetadata& md = sys.metadata();
  for (int k = 0; k < 5; ++k) {
    double lw = std::log10(md.freq_min), hw = std::log10(md.freq_max);
    Cplx s(0.0, std::pow(10.0, rng.uniform(lw, hw)));
    Eigen::VectorXd pv(sys.num_params());
    for (Index j = 0; j < pv.size(); ++j) {
      auto iv = md.param_box.empty() ? std::array<double, 2>{0.0, 0.0}
                                     : md.param_box[static_cast<std::size_t>(j)];
      pv(j) = rng.uniform(iv[0], iv[1]);
    }
    try {
      KSolver probe(result.reduced, s, as_span(pv));
    } catch (const SingularSystemError& e) {
      result.warnings.push_back(std::string("reduced K singular at probe point: ") +
                                e.what());
    } catch (const EvalError&) {
      // coefficient pole at the probe point; not a property of the reduction
    }
  }
  return result;
}

}  // namespace

ReduceResult drop_reduce(const StructuredSystem& sys, const ProjectionPair& pair,
                         const TruncationPolicy& policy, ProjectionSide side) {
  return reduce_with(sys, pair.v, pair.w, policy, side, pair.orthonormalized,
                     pair.realified, pair.sample_seed);
}

ReduceResult drop_reduce(const StructuredSystem& sys, const DenseMat& v,
                         const DenseMat& w, const TruncationPolicy& policy,
                         ProjectionSide side) {
  return reduce_with(sys, v, w, policy, side, false, false, 0);
}

ReduceResult minimal_realization(const StructuredSystem& sys,
                                 const ProjectionPair& pair) {
  return drop_reduce(sys, pair, TruncationPolicy::relative(kFullRankTol));
}

ReduceResult minimal_realization(const StructuredSystem& sys, const DenseMat& v,
                                 const DenseMat& w) {
  return drop_reduce(sys, v, w, TruncationPolicy::relative(kFullRankTol));
}

}  // namespace drop
