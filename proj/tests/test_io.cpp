// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "drop/io.hpp"

using drop::Cplx;
using drop::DenseMat;
using drop::MatrixVariant;
using drop::SparseMat;

namespace {

MatrixVariant roundtrip(const MatrixVariant& m) {
  std::stringstream buf;
  drop::write_matrix(buf, m);
  return drop::read_matrix(buf, "<memory>");
}

bool bitwise_equal(const MatrixVariant& a, const MatrixVariant& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  DenseMat da = a.to_dense(), db = b.to_dense();
  for (Eigen::Index j = 0; j < da.cols(); ++j)
    for (Eigen::Index i = 0; i < da.rows(); ++i)
      if (da(i, j).real() != db(i, j).real() || da(i, j).imag() != db(i, j).imag())
        return false;
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("dense identity round-trips bitwise") {
  MatrixVariant m{Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2))};
  MatrixVariant back = roundtrip(m);
  CHECK(!back.is_sparse());
  CHECK(bitwise_equal(m, back));
}

TEST_CASE("out-of-bounds coordinate entry names the line") {
  std::stringstream buf;
  buf << "%%MatrixMarket matrix coordinate real general\n"
      << "2 2 1\n"
      << "3 1 5.0\n";
  try {
    drop::read_matrix(buf, "<memory>");
    FAIL("expected IoError");
  } catch (const drop::IoError& e) {
    std::string msg = e.what();
    CHECK(msg.find(":3:") != std::string::npos);  // entry is on line 3
    CHECK(msg.find("(3,1)") != std::string::npos);
  }
}

TEST_CASE("complex entry parses as re im pair") {
  std::stringstream buf;
  buf << "%%MatrixMarket matrix coordinate complex general\n"
      << "1 1 1\n"
      << "1 1 1.5 -2.25\n";
  MatrixVariant m = drop::read_matrix(buf, "<memory>");
  CHECK(m.is_sparse());
  CHECK(m.to_dense()(0, 0) == Cplx(1.5, -2.25));
}

TEST_CASE("sparse read stays sparse; symmetric mirrors entries") {
  std::stringstream buf;
  buf << "%%MatrixMarket matrix coordinate real symmetric\n"
      << "3 3 2\n"
      << "1 1 4.0\n"
      << "3 1 -1.0\n";
  MatrixVariant m = drop::read_matrix(buf, "<memory>");
  REQUIRE(m.is_sparse());
  CHECK(m.to_dense()(0, 2) == Cplx(-1.0, 0));
  CHECK(m.to_dense()(2, 0) == Cplx(-1.0, 0));
  CHECK(m.sparse().nonZeros() == 3);
}

TEST_CASE("malformed header and values") {
  std::stringstream a("not a matrix file\n");
  CHECK_THROWS_AS(drop::read_matrix(a, "<a>"), drop::IoError);
  std::stringstream b("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 zz\n");
  CHECK_THROWS_AS(drop::read_matrix(b, "<b>"), drop::IoError);
  std::stringstream c("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n");
  CHECK_THROWS_AS(drop::read_matrix(c, "<c>"), drop::IoError);
}

TEST_CASE("property: random matrices round-trip exactly") {
  std::mt19937_64 gen(0x10a);
  auto rnd = [&] {
    // full-precision doubles, negatives and a wide exponent range
    double mant = ((gen() >> 11) * 0x1.0p-53) * 2 - 1;
    int expo = static_cast<int>(gen() % 41) - 20;
    return mant * std::pow(10.0, expo);
  };
  for (int trial = 0; trial < 10; ++trial) {
    const int rows = 1 + static_cast<int>(gen() % 6);
    const int cols = 1 + static_cast<int>(gen() % 6);
    const bool sparse = gen() % 2, complex_vals = gen() % 2;
    if (sparse) {
      SparseMat s(rows, cols);
      for (int k = 0; k < rows; ++k)
        s.coeffRef(static_cast<int>(gen() % rows), static_cast<int>(gen() % cols)) =
            Cplx(rnd(), complex_vals ? rnd() : 0.0);
      s.makeCompressed();
      MatrixVariant m{s};
      MatrixVariant back = roundtrip(m);
      CHECK(back.is_sparse());
      CHECK(bitwise_equal(m, back));
    } else {
      DenseMat d(rows, cols);
      for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
          d(i, j) = Cplx(rnd(), complex_vals ? rnd() : 0.0);
      MatrixVariant m{d};
      CHECK(bitwise_equal(m, roundtrip(m)));
    }
  }
}

TEST_CASE("manifest round-trip") {
  drop::Manifest man;
  man.name = "probe";
  man.n = 3;
  man.m = 1;
  man.p = 1;
  man.d = 2;
  man.freq_min = 1e-3;
  man.freq_max = 1e3;
  man.param_box = {{-1, 1}, {0, 5}};
  man.k_terms = {{"s", "k0.mtx"}, {"-p1", "k1.mtx"}};
  man.b_terms = {{"1", "b0.mtx"}};
  man.c_terms = {{"p2", "c0.mtx"}};

  auto dir = std::filesystem::temp_directory_path() / "dropmor_io_test";
  std::filesystem::create_directories(dir);
  drop::write_manifest(dir / "m.json", man);
  drop::Manifest back = drop::read_manifest(dir / "m.json");
  CHECK(back.name == man.name);
  CHECK(back.n == 3);
  CHECK(back.d == 2);
  CHECK(back.param_box == man.param_box);
  CHECK(back.k_terms.size() == 2);
  CHECK(back.k_terms[1].coeff == "-p1");
  CHECK(back.c_terms[0].matrix_path == "c0.mtx");
  CHECK_THROWS_AS(drop::read_manifest(dir / "missing.json"), drop::IoError);
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
