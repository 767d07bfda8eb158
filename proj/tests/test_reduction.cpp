// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "drop/analysis.hpp"
#include "drop/benchmarks.hpp"
#include "drop/projection.hpp"
#include "drop/reduction.hpp"
#include "test_helpers.hpp"

using drop::Cplx;
using drop::DenseMat;
using drop::ProjectionSide;
using drop::SampleSet;
using drop::StructuredSystem;
using drop::TruncationPolicy;

namespace {

SampleSet imaginary_points(int count, double omega0, double factor = 1.5) {
  SampleSet set;
  double om = omega0;
  for (int k = 0; k < count; ++k, om *= factor)
    set.points.push_back({Cplx(0, om), Eigen::VectorXd(0), std::nullopt, std::nullopt});
  return set;
}

SampleSet demo_samples(int count, std::uint64_t seed) {
  drop::SamplingSpec spec;
  spec.freq_min = 1e-4;
  spec.freq_max = 10;
  spec.num_freq = count;
  spec.param_box = {{-10, 10}};
  return drop::make_sample_set(spec, seed);
}

double max_rel_transfer_gap(const StructuredSystem& sys, const StructuredSystem& red,
                            const std::vector<Cplx>& freqs,
                            const std::vector<Eigen::VectorXd>& params) {
  double worst = 0;
  for (const auto& p : params)
    for (const Cplx& s : freqs) {
      DenseMat h = drop::transfer(sys, s, p);
      DenseMat hh = drop::transfer(red, s, p);
      worst = std::max(worst, (h - hh).norm() / (1.0 + h.norm()));
    }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("reduction");

TEST_CASE("stacked svd of a diagonal single term") {
  std::vector<drop::StructuredTerm> k_terms;
  Eigen::MatrixXd a = Eigen::Vector3d(3, 2, 1).asDiagonal();
  k_terms.push_back({drop::CoeffExpr::parse("s"), drop::MatrixVariant(a)});
  DenseMat eye = DenseMat::Identity(3, 3);
  drop::StackedSvd out = drop::stacked_svd(eye, eye, k_terms);
  REQUIRE(out.report.sv_left.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(out.report.sv_left(i) == doctest::Approx(3.0 - i).epsilon(1e-14));
    CHECK(out.report.sv_right(i) == doctest::Approx(3.0 - i).epsilon(1e-14));
  }
  // factors are the identity up to column signs
  CHECK((out.w1.cwiseAbs() - eye.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((out.v1.cwiseAbs() - eye.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("duplicated term scales singular values by sqrt 2") {
  std::mt19937_64 gen(5);
  Eigen::MatrixXd a = drop_test::random_matrix(gen, 6, 6);
  std::vector<drop::StructuredTerm> one, two;
  one.push_back({drop::CoeffExpr::parse("s"), drop::MatrixVariant(a)});
  two.push_back({drop::CoeffExpr::parse("s"), drop::MatrixVariant(a)});
  two.push_back({drop::CoeffExpr::parse("1"), drop::MatrixVariant(a)});
  DenseMat v = drop_test::random_matrix(gen, 6, 4).cast<Cplx>();
  DenseMat w = drop_test::random_matrix(gen, 6, 4).cast<Cplx>();
  auto single = drop::stacked_svd(v, w, one);
  auto doubled = drop::stacked_svd(v, w, two);
  REQUIRE(single.report.sv_left.size() <= doubled.report.sv_left.size());
  for (int i = 0; i < single.report.sv_left.size(); ++i) {
    CHECK(doubled.report.sv_left(i) ==
          doctest::Approx(std::sqrt(2.0) * single.report.sv_left(i)).epsilon(1e-12));
    CHECK(doubled.report.sv_right(i) ==
          doctest::Approx(std::sqrt(2.0) * single.report.sv_right(i)).epsilon(1e-12));
  }
}

TEST_CASE("demo stacks have exactly two significant singular values") {
  auto sys = drop::bench::demo_system();
  auto pair = drop::build_projection(sys, demo_samples(10, 0));
  auto out = drop::stacked_svd(pair.v, pair.w, sys.k_terms());
  CHECK(out.report.rank_at(1e-12) == 2);
  CHECK(out.report.rank_right_at(1e-12) == 2);
  // report invariants: descending lists, monotone rank map
  for (int i = 1; i < out.report.sv_left.size(); ++i)
    CHECK(out.report.sv_left(i) <= out.report.sv_left(i - 1));
  int prev = out.report.sv_left.size();
  for (const auto& [tol, rank] : out.report.numerical_rank_at) {
    CHECK(rank <= prev);  // map iterates tol ascending; rank must not grow
    prev = rank;
  }
}

TEST_CASE("choose_order policies") {
  drop::SvdReport report;
  report.sv_left = Eigen::Vector3d(1.0, 1e-3, 1e-9);
  report.sv_right = report.sv_left;
  CHECK(drop::choose_order(report, TruncationPolicy::relative(1e-6)) == 2);

  drop::SvdReport flat;
  flat.sv_left = Eigen::Vector3d(1.0, 1.0, 1.0);
  flat.sv_right = flat.sv_left;
  CHECK(drop::choose_order(flat, TruncationPolicy::fixed(5)) == 3);
  CHECK(!flat.warnings.empty());  // clamped

  auto sys = drop::bench::demo_system();
  auto pair = drop::build_projection(sys, demo_samples(10, 0));
  auto out = drop::stacked_svd(pair.v, pair.w, sys.k_terms());
  CHECK(drop::choose_order(out.report, TruncationPolicy::relative(1e-8)) == 2);

  CHECK_THROWS_AS(TruncationPolicy::fixed(0), std::invalid_argument);
  CHECK_THROWS_AS(TruncationPolicy::relative(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TruncationPolicy::relative(1.5), std::invalid_argument);
}

TEST_CASE("demo reduction to order 2 is exact to machine precision") {
  auto sys = drop::bench::demo_system();
  auto pair = drop::build_projection(sys, demo_samples(10, 0));
  auto result = drop::drop_reduce(sys, pair, TruncationPolicy::fixed(2));
  CHECK(result.reduced.n() == 2);
  CHECK(result.report.realified_bases);

  std::vector<Cplx> freqs = drop::log_freq_grid(1e-4, 10, 100);
  std::vector<Eigen::VectorXd> params;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd p(1);
    p(0) = -10.0 + 20.0 * k / 19.0;
    params.push_back(p);
  }
  double worst = 0;
  for (const auto& p : params)
    for (const Cplx& s : freqs)
      worst = std::max(worst, std::abs(drop::transfer(sys, s, p)(0, 0) -
                                       drop::transfer(result.reduced, s, p)(0, 0)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("projection by the identity reproduces the system exactly") {
  auto sys = drop::bench::demo_system();
  DenseMat eye = DenseMat::Identity(3, 3);
  auto result = drop::drop_reduce(sys, eye, eye, TruncationPolicy::fixed(3));
  REQUIRE(result.reduced.n() == 3);
  for (double om : {0.01, 1.0, 9.0}) {
    Eigen::VectorXd p(1);
    p(0) = 4.2;
    Cplx a = drop::transfer(sys, Cplx(0, om), p)(0, 0);
    Cplx b = drop::transfer(result.reduced, Cplx(0, om), p)(0, 0);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("structure preservation: coefficient expressions are shared") {
  auto sys = drop::bench::demo_system();
  auto pair = drop::build_projection(sys, demo_samples(10, 1));
  auto result = drop::drop_reduce(sys, pair, TruncationPolicy::relative(1e-8));
  REQUIRE(result.reduced.k_terms().size() == sys.k_terms().size());
  for (std::size_t i = 0; i < sys.k_terms().size(); ++i) {
    CHECK(result.reduced.k_terms()[i].coeff.same_ast(sys.k_terms()[i].coeff));
    CHECK(result.reduced.k_terms()[i].coeff.to_string() ==
          sys.k_terms()[i].coeff.to_string());
    CHECK(!result.reduced.k_terms()[i].matrix.is_sparse());  // dense by design
  }
}

TEST_CASE("interpolation holds at every sample point before truncation") {
  auto sys = drop::bench::delay_system(30);
  drop::SamplingSpec spec;
  spec.freq_min = 1e-2;
  spec.freq_max = 1e3;
  spec.num_freq = 10;
  SampleSet samples = drop::make_sample_set(spec, 4);
  auto pair = drop::build_projection(sys, samples);
  auto result = drop::minimal_realization(sys, pair);
  auto interp = drop::verify_interpolation(sys, result.reduced, samples, 1e-8);
  CHECK(interp.pass);
  auto hermite = drop::verify_hermite(sys, result.reduced, samples, 1e-5);
  CHECK(hermite.pass);
}

TEST_CASE("tangential interpolation for a MIMO system") {
  std::mt19937_64 gen(0x3d);
  const Eigen::Index n = 10;
  auto sys = drop_test::first_order(drop_test::random_stable(gen, n),
                                    drop_test::random_matrix(gen, n, 2),
                                    drop_test::random_matrix(gen, 2, n));
  drop::SamplingSpec spec;
  spec.freq_min = 0.1;
  spec.freq_max = 10;
  spec.num_freq = 12;
  spec.tangential = true;
  SampleSet samples = drop::make_sample_set(spec, 9, 2, 2);
  auto pair = drop::build_projection(sys, samples);
  CHECK(pair.v.cols() <= 12 * 2);  // one column per point before realify
  auto result = drop::minimal_realization(sys, pair);
  auto interp = drop::verify_interpolation(sys, result.reduced, samples, 1e-8);
  CHECK(interp.pass);
}

TEST_CASE("one-sided reduction ignores W and sets W_p = V_p") {
  auto sys = drop::bench::demo_system();
  auto pair = drop::build_projection(sys, demo_samples(10, 2));
  auto one = drop::drop_reduce(sys, pair, TruncationPolicy::fixed(2),
                               ProjectionSide::OneSided);
  CHECK((one.v_p - one.w_p).cwiseAbs().maxCoeff() == 0.0);

  // the W argument is genuinely ignored
  drop::ProjectionPair scrambled = pair;
  scrambled.w = pair.v * Cplx(0.5, 0);
  auto one_b = drop::drop_reduce(sys, scrambled, TruncationPolicy::fixed(2),
                                 ProjectionSide::OneSided);
  CHECK((one.v_p - one_b.v_p).cwiseAbs().maxCoeff() == 0.0);

  // the V-side factor agrees with the two-sided machinery fed W := V
  drop::ProjectionPair both = pair;
  both.w = pair.v;
  auto two = drop::drop_reduce(sys, both, TruncationPolicy::fixed(2));
  CHECK((one.v_p - two.v_p).cwiseAbs().maxCoeff() <= 1e-13);

  // untruncated: V_p keeps range(V), so the right interpolation conditions
  // hold even with the Galerkin test space W = V
  SampleSet samples = demo_samples(10, 2);
  auto pair2 = drop::build_projection(sys, samples);
  auto full = drop::drop_reduce(sys, pair2, TruncationPolicy::relative(1e-10),
                                ProjectionSide::OneSided);
  auto interp = drop::verify_interpolation(sys, full.reduced, samples, 1e-8);
  CHECK(interp.pass);
}

TEST_CASE("minimal realization recovers the constructed minimal order") {
  std::mt19937_64 gen(0x77);
  const Eigen::Index k = 3, junk = 2, n = k + junk;
  // reachable-and-observable leading block, unreachable trailing block
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner(k, k) = drop_test::random_stable(gen, k);
  a.bottomRightCorner(junk, junk) = drop_test::random_stable(gen, junk);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 1);
  b.topRows(k) = drop_test::random_matrix(gen, k, 1);
  Eigen::MatrixXd c = drop_test::random_matrix(gen, 1, n);  // junk observable
  auto sys = drop_test::first_order(a, b, c);

  // Kalman oracle: reachable rank k
  Eigen::MatrixXd reach = drop::kalman_subspace(a, b);
  REQUIRE(reach.cols() == k);

  SampleSet samples = imaginary_points(8, 0.3);
  auto pair = drop::build_projection(sys, samples);
  auto result = drop::minimal_realization(sys, pair);
  CHECK(result.reduced.n() == k);

  std::mt19937_64 freq_gen(0x99);
  std::vector<Cplx> probes;
  for (int t = 0; t < 100; ++t)
    probes.emplace_back(0, 0.05 + 10.0 * (drop_test::uniform_pm1(freq_gen) + 1.0));
  CHECK(max_rel_transfer_gap(sys, result.reduced, probes, {Eigen::VectorXd(0)}) <=
        1e-8);
}

TEST_CASE("already-minimal system keeps its order") {
  std::mt19937_64 gen(0x12);
  const Eigen::Index n = 5;
  auto sys = drop_test::first_order(drop_test::random_stable(gen, n),
                                    drop_test::random_matrix(gen, n, 1),
                                    drop_test::random_matrix(gen, 1, n));
  auto pair = drop::build_projection(sys, imaginary_points(8, 0.5));
  auto result = drop::minimal_realization(sys, pair);
  CHECK(result.reduced.n() == 5);
}

TEST_CASE("demo minimal realization has order 2 with exact transfer") {
  auto sys = drop::bench::demo_system();
  auto pair = drop::build_projection(sys, demo_samples(10, 3));
  auto result = drop::minimal_realization(sys, pair);
  CHECK(result.reduced.n() == 2);
  std::vector<Eigen::VectorXd> params(1, Eigen::VectorXd(1));
  params[0](0) = -7.5;
  CHECK(max_rel_transfer_gap(sys, result.reduced, drop::log_freq_grid(1e-4, 10, 50),
                             params) <= 1e-10);
}

TEST_CASE("full-rank reduction realizes the delay transfer everywhere") {
  auto sys = drop::bench::delay_system(12);
  drop::SamplingSpec spec;
  spec.freq_min = 1e-2;
  spec.freq_max = 1e2;
  spec.num_freq = 30;
  SampleSet samples = drop::make_sample_set(spec, 6);
  auto pair = drop::build_projection(sys, samples);
  auto result = drop::minimal_realization(sys, pair);
  CHECK(max_rel_transfer_gap(sys, result.reduced, drop::log_freq_grid(1e-2, 1e2, 60),
                             {Eigen::VectorXd(0)}) <= 1e-8);
}

TEST_SUITE_END();
