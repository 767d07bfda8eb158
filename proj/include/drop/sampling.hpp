// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "drop/types.hpp"

namespace drop {

/// Reproducible random source: a std::mt19937_64 stream (fully specified
/// by the standard, hence platform-independent) with fixed mappings --
/// uniform doubles via (x >> 11) * 2^-53 and normals via Box-Muller --
/// instead of the library-defined distributions, which are not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform01() { return static_cast<double>(state_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }
  double normal();

  /// Independent substream for stream id k (seed mixing via splitmix64).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 state_;
  bool have_spare_ = false;
  double spare_ = 0;
};

/// One interpolation point: frequency sigma (typically i*omega), parameter
/// vector, and optional unit tangential directions.
struct SamplePoint {
  Cplx sigma;
  Eigen::VectorXd param;                     // length d
  std::optional<Eigen::VectorXd> right_dir;  // unit m-vector
  std::optional<Eigen::VectorXd> left_dir;   // unit p-vector
};

struct SamplingSpec {
  double freq_min = 1e-2;
  double freq_max = 1e2;
  int num_freq = 100;
  std::vector<std::array<double, 2>> param_box;  // size d (may be empty)
  int num_param = 0;                             // ignored when box empty
  bool tangential = false;
  enum class Pairing { Zip, Tensor } pairing = Pairing::Zip;
};

/// Deterministic product of (spec, seed): regeneration reproduces the
/// identical point list. Points are pairwise distinct in (sigma, p).
struct SampleSet {
  std::vector<SamplePoint> points;
  std::uint64_t seed = 0;
  SamplingSpec spec;
};

/// i*omega_j with omega_j log-equispaced in [omega_min, omega_max],
/// inclusive of both endpoints; n == 1 returns i*omega_min.
std::vector<Cplx> log_freq_grid(double omega_min, double omega_max, int n);

/// n vectors, coordinate k uniform in box[k].
std::vector<Eigen::VectorXd> random_param_grid(
    const std::vector<std::array<double, 2>>& box, int n, std::uint64_t seed);

/// n unit vectors with rotation-invariant direction (normalized
/// independent standard normals).
std::vector<Eigen::VectorXd> random_tangent_dirs(int dim, int n, std::uint64_t seed);

/// Build the point set. Zip pairing matches frequency j with parameter j
/// (num_freq must equal num_param); tensor pairing takes all pairs.
/// Tangential directions need the system input/output sizes m and p.
SampleSet make_sample_set(const SamplingSpec& spec, std::uint64_t seed, Index m = 0,
                          Index p = 0);

}  // namespace drop
