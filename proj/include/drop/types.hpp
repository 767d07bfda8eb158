// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace drop {

using Cplx = std::complex<double>;
using DenseMat = Eigen::MatrixXcd;
using SparseMat = Eigen::SparseMatrix<Cplx>;
using Index = Eigen::Index;

/// A constant system matrix, stored dense or sparse. Storage is complex
/// throughout so that frequency evaluation needs a single code path; real
/// input data simply carries a zero imaginary part.
class MatrixVariant {
 public:
  MatrixVariant() : storage_(DenseMat()) {}
  MatrixVariant(DenseMat m) : storage_(std::move(m)) {}
  MatrixVariant(SparseMat m) : storage_(std::move(m)) {}
  MatrixVariant(const Eigen::MatrixXd& m) : storage_(DenseMat(m.cast<Cplx>())) {}
  MatrixVariant(const Eigen::SparseMatrix<double>& m)
      : storage_(SparseMat(m.cast<Cplx>())) {}

  bool is_sparse() const { return std::holds_alternative<SparseMat>(storage_); }

  Index rows() const {
    return is_sparse() ? sparse().rows() : dense().rows();
  }
  Index cols() const {
    return is_sparse() ? sparse().cols() : dense().cols();
  }

  const DenseMat& dense() const { return std::get<DenseMat>(storage_); }
  const SparseMat& sparse() const { return std::get<SparseMat>(storage_); }

  DenseMat to_dense() const {
    return is_sparse() ? DenseMat(sparse()) : dense();
  }

  Index nonzeros() const {
    return is_sparse() ? sparse().nonZeros() : dense().size();
  }

  /// True when every stored entry has exactly zero imaginary part.
  bool is_real() const {
    if (is_sparse()) {
      const SparseMat& s = sparse();
      for (int k = 0; k < s.outerSize(); ++k)
        for (SparseMat::InnerIterator it(s, k); it; ++it)
          if (it.value().imag() != 0.0) return false;
      return true;
    }
    return (dense().imag().array() == 0.0).all();
  }

 private:
  std::variant<DenseMat, SparseMat> storage_;
};

}  // namespace drop
