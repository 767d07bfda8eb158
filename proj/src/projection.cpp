// SPDX-License-Identifier: Apache-2.0
#include "drop/projection.hpp"

#include <sstream>

#include <Eigen/SVD>

namespace drop {

namespace {

BuildResult build_side(const StructuredSystem& sys, const SampleSet& samples,
                       const BuildOptions& opts, bool left) {
  const Index n = sys.n();
  std::vector<DenseMat> blocks;
  BuildResult result;
  Index total_cols = 0;
  for (std::size_t j = 0; j < samples.points.size(); ++j) {
    const SamplePoint& pt = samples.points[j];
    auto p = as_span(pt.param);
    try {
      KSolver solver(sys, pt.sigma, p);
      DenseMat rhs;
      if (left) {
        rhs = assemble_dense(sys, Role::C, pt.sigma, p).transpose();
        if (pt.left_dir) rhs = DenseMat(rhs * pt.left_dir->cast<Cplx>());
      } else {
        rhs = assemble_dense(sys, Role::B, pt.sigma, p);
        if (pt.right_dir) rhs = DenseMat(rhs * pt.right_dir->cast<Cplx>());
      }
      DenseMat x = left ? solver.solve_transposed(rhs) : solver.solve(rhs);
      total_cols += x.cols();
      blocks.push_back(std::move(x));
      result.used_points.push_back(static_cast<int>(j));
    } catch (const std::exception& e) {
      if (opts.on_singular == BuildOptions::OnSingular::Throw) throw;
      std::ostringstream os;
      os << (left ? "build_w" : "build_v") << ": dropping sample point " << j << ": "
         << e.what();
      result.warnings.push_back(os.str());
    }
  }
  result.matrix.resize(n, total_cols);
  Index col = 0;
  for (const DenseMat& b : blocks) {
    result.matrix.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  return result;
}

template <typename Mat>
Mat orthonormalize_impl(const Mat& m, double rel_drop_tol) {
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  if (smax <= 0.0) return Mat(m.rows(), 0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > rel_drop_tol * smax) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

BuildResult build_v(const StructuredSystem& sys, const SampleSet& samples,
                    const BuildOptions& opts) {
  return build_side(sys, samples, opts, false);
}

BuildResult build_w(const StructuredSystem& sys, const SampleSet& samples,
                    const BuildOptions& opts) {
  return build_side(sys, samples, opts, true);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m, double rel_drop_tol) {
  return orthonormalize_impl(m, rel_drop_tol);
}

DenseMat orthonormalize(const DenseMat& m, double rel_drop_tol) {
  return orthonormalize_impl(m, rel_drop_tol);
}

Eigen::MatrixXd realify(const DenseMat& m, double rel_drop_tol) {
  Eigen::MatrixXd stacked(m.rows(), 2 * m.cols());
  stacked << m.real(), m.imag();
  return orthonormalize(stacked, rel_drop_tol);
}

namespace {

Eigen::MatrixXd real_stack(const DenseMat& m) {
  Eigen::MatrixXd stacked(m.rows(), 2 * m.cols());
  stacked << m.real(), m.imag();
  return stacked;
}

}  // namespace

ProjectionPair build_projection(const StructuredSystem& sys, const SampleSet& samples,
                                const BuildOptions& opts) {
  BuildResult rv = build_v(sys, samples, opts);
  BuildResult rw = build_w(sys, samples, opts);
  ProjectionPair pair;
  pair.sample_seed = samples.seed;
  pair.warnings = rv.warnings;
  pair.warnings.insert(pair.warnings.end(), rw.warnings.begin(), rw.warnings.end());
  if (sys.real_data()) {
    pair.v = real_stack(rv.matrix).cast<Cplx>();
    pair.w = real_stack(rw.matrix).cast<Cplx>();
    pair.realified = true;
  } else {
    pair.v = std::move(rv.matrix);
    pair.w = std::move(rw.matrix);
  }
  return pair;
}

}  // namespace drop
