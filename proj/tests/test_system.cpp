// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "drop/benchmarks.hpp"
#include "drop/sampling.hpp"
#include "drop/system.hpp"
#include "test_helpers.hpp"

using drop::Cplx;
using drop::DenseMat;
using drop::Role;
using drop::StructuredSystem;

TEST_SUITE_BEGIN("system");

TEST_CASE("demo K(0,0) assembles to diag(2,1,2)") {
  StructuredSystem sys = drop::bench::demo_system();
  double p0[1] = {0.0};
  DenseMat k = drop::assemble_dense(sys, Role::K, Cplx(0, 0), p0);
  DenseMat expected = DenseMat::Zero(3, 3);
  expected(0, 0) = 2;
  expected(1, 1) = 1;
  expected(2, 2) = 2;
  CHECK((k - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity coefficient returns the constant matrix") {
  StructuredSystem sys = drop::bench::demo_system();
  double p0[1] = {3.7};
  DenseMat b = drop::assemble_dense(sys, Role::B, Cplx(2.5, -1), p0);
  CHECK(b(0, 0) == Cplx(1, 0));
  CHECK(b(1, 0) == Cplx(0, 0));
  CHECK(b(2, 0) == Cplx(1, 0));
}

TEST_CASE("heat K(1) matches the dense hand assembly") {
  StructuredSystem sys = drop::bench::heat_fading_memory(4, 1.05);
  DenseMat k = drop::assemble_dense(sys, Role::K, Cplx(1, 0), {});
  // K(s) = sI - A + A/(s+gamma) at s=1: I - (1 - 1/2.05) A
  DenseMat a = sys.k_terms()[1].matrix.to_dense();  // the term matrix is A itself
  DenseMat oracle = DenseMat::Identity(16, 16) - (1.0 - 1.0 / 2.05) * a;
  CHECK((k - oracle).cwiseAbs().maxCoeff() < 1e-15 * oracle.cwiseAbs().maxCoeff());
  // sparse terms stay sparse
  CHECK(drop::assemble(sys, Role::K, Cplx(1, 0), {}).is_sparse());
}

TEST_CASE("demo transfer at (0,0) is one half") {
  StructuredSystem sys = drop::bench::demo_system();
  double p0[1] = {0.0};
  DenseMat h = drop::transfer(sys, Cplx(0, 0), p0);
  REQUIRE(h.rows() == 1);
  REQUIRE(h.cols() == 1);
  CHECK(std::abs(h(0, 0) - Cplx(0.5, 0)) < 1e-15);
}

TEST_CASE("scalar first-order transfers") {
  StructuredSystem sys = drop_test::scalar_system(-1.0);  // K(s) = s + 1
  CHECK(std::abs(drop::transfer(sys, Cplx(0, 0))(0, 0) - Cplx(1, 0)) < 1e-15);
  CHECK(std::abs(drop::transfer(sys, Cplx(0, 1))(0, 0) - Cplx(0.5, -0.5)) < 1e-15);
}

TEST_CASE("sweep equals pointwise calls and keeps input order") {
  StructuredSystem sys = drop::bench::demo_system();
  std::vector<Cplx> freqs{{0, 0.1}, {0, 1}, {0, 10}};
  std::vector<Eigen::VectorXd> params(2, Eigen::VectorXd(1));
  params[0](0) = -3;
  params[1](0) = 5;
  drop::SweepResult sweep = drop::transfer_sweep(sys, freqs, params);
  REQUIRE(sweep.values.size() == 6);
  CHECK(sweep.failures.empty());
  for (std::size_t ip = 0; ip < 2; ++ip)
    for (std::size_t iw = 0; iw < 3; ++iw) {
      DenseMat single = drop::transfer(sys, freqs[iw], params[ip]);
      CHECK(std::abs(sweep.at(iw, ip)(0, 0) - single(0, 0)) == 0.0);
    }
}

TEST_CASE("empty frequency list gives empty sweep") {
  StructuredSystem sys = drop_test::scalar_system(-1.0);
  drop::SweepResult sweep = drop::transfer_sweep(sys, {}, {Eigen::VectorXd(0)});
  CHECK(sweep.values.empty());
  CHECK(sweep.failures.empty());
}

TEST_CASE("delay sweep matches pointwise to 1e-14") {
  StructuredSystem sys = drop::bench::delay_system(500);
  std::vector<Cplx> freqs = drop::log_freq_grid(1e-2, 1e4, 10);
  std::vector<Eigen::VectorXd> params{Eigen::VectorXd(0)};
  drop::SweepResult sweep = drop::transfer_sweep(sys, freqs, params);
  CHECK(sweep.failures.empty());
  for (std::size_t iw = 0; iw < freqs.size(); ++iw) {
    Cplx batch = sweep.at(iw, 0)(0, 0);
    Cplx single = drop::transfer(sys, freqs[iw])(0, 0);
    CHECK(std::isfinite(std::abs(batch)));
    CHECK(std::abs(batch - single) <= 1e-14 * std::abs(single));
  }
}

TEST_CASE("strict properness of the bundled benchmarks") {
  auto decay_ratio = [](const StructuredSystem& sys) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(sys.num_params());
    const double w_max = sys.metadata().freq_max;
    double near = drop::transfer(sys, Cplx(0, w_max), p).cwiseAbs().maxCoeff();
    double far = drop::transfer(sys, Cplx(0, 1e6 * w_max), p).cwiseAbs().maxCoeff();
    return near / far;
  };
  CHECK(decay_ratio(drop::bench::demo_system()) >= 100.0);
  CHECK(decay_ratio(drop::bench::delay_system(64)) >= 100.0);
  CHECK(decay_ratio(drop::bench::heat_fading_memory(8)) >= 100.0);
}

TEST_CASE("conjugate symmetry for real-data systems") {
  StructuredSystem sys = drop::bench::delay_system(32);
  for (double om : {0.05, 1.0, 40.0, 2500.0}) {
    Cplx up = drop::transfer(sys, Cplx(0, om))(0, 0);
    Cplx down = drop::transfer(sys, Cplx(0, -om))(0, 0);
    CHECK(std::abs(down - std::conj(up)) <= 1e-12 * std::abs(up));
  }
}

TEST_CASE("transfer agrees with the explicit dense inverse, n <= 50") {
  StructuredSystem sys = drop::bench::delay_system(40);
  for (double om : {0.3, 7.0, 300.0}) {
    Cplx s(0, om);
    DenseMat k = drop::assemble_dense(sys, Role::K, s, {});
    DenseMat b = drop::assemble_dense(sys, Role::B, s, {});
    DenseMat c = drop::assemble_dense(sys, Role::C, s, {});
    DenseMat oracle = c * k.inverse() * b;  // explicit inverse, test-only route
    Cplx fast = drop::transfer(sys, s)(0, 0);
    CHECK(std::abs(fast - oracle(0, 0)) <= 1e-12 * std::abs(oracle(0, 0)));
  }
}

TEST_CASE("singular K raises an error carrying the sample point") {
  // K(s) = sI is singular exactly at s = 0
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  std::mt19937_64 gen(7);
  StructuredSystem sys = drop_test::first_order(zero, drop_test::random_matrix(gen, 3, 1),
                                                drop_test::random_matrix(gen, 1, 3));
  try {
    drop::transfer(sys, Cplx(0, 0));
    FAIL("expected SingularSystemError");
  } catch (const drop::SingularSystemError& e) {
    CHECK(e.s() == Cplx(0, 0));
  }
  // sparse path: delay system at a forced-singular point does not apply;
  // instead check the sparse heat system solves fine off the spectrum
  CHECK_NOTHROW(drop::transfer(drop::bench::heat_fading_memory(4), Cplx(0, 1)));
}

TEST_CASE("dimension validation") {
  std::mt19937_64 gen(11);
  Eigen::MatrixXd a = drop_test::random_matrix(gen, 3, 3);
  Eigen::MatrixXd b = drop_test::random_matrix(gen, 2, 1);  // wrong rows
  Eigen::MatrixXd c = drop_test::random_matrix(gen, 1, 3);
  CHECK_THROWS_AS(drop_test::first_order(a, b, c), std::invalid_argument);
}

TEST_SUITE_END();
