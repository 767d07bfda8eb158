// SPDX-License-Identifier: Apache-2.0
#include "drop/sampling.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace drop {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 step on seed xor stream tag
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Cplx> log_freq_grid(double omega_min, double omega_max, int n) {
  if (!(omega_min > 0) || !(omega_max >= omega_min))
    throw std::invalid_argument("log_freq_grid needs 0 < omega_min <= omega_max");
  if (n < 1) throw std::invalid_argument("log_freq_grid needs n >= 1");
  std::vector<Cplx> out;
  out.reserve(n);
  if (n == 1) {
    out.emplace_back(0.0, omega_min);
    return out;
  }
  double lo = std::log10(omega_min);
  double hi = std::log10(omega_max);
  for (int j = 0; j < n; ++j) {
    double omega = j == 0       ? omega_min
                   : j == n - 1 ? omega_max
                                : std::pow(10.0, lo + (hi - lo) * j / (n - 1));
    out.emplace_back(0.0, omega);
  }
  return out;
}

std::vector<Eigen::VectorXd> random_param_grid(
    const std::vector<std::array<double, 2>>& box, int n, std::uint64_t seed) {
  if (box.empty()) throw std::invalid_argument("random_param_grid: empty box");
  for (const auto& iv : box)
    if (!(iv[1] >= iv[0]))
      throw std::invalid_argument("random_param_grid: empty interval");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd v(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) v(j) = rng.uniform(box[j][0], box[j][1]);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Eigen::VectorXd> random_tangent_dirs(int dim, int n, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_tangent_dirs: dim >= 1 required");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd v(dim);
    double nrm = 0;
    do {
      for (int j = 0; j < dim; ++j) v(j) = rng.normal();
      nrm = v.norm();
    } while (nrm == 0.0);
    out.push_back(v / nrm);
  }
  return out;
}

namespace {

struct PointKey {
  Cplx sigma;
  Eigen::VectorXd param;
  bool operator<(const PointKey& o) const {
    if (sigma.real() != o.sigma.real()) return sigma.real() < o.sigma.real();
    if (sigma.imag() != o.sigma.imag()) return sigma.imag() < o.sigma.imag();
    for (Index i = 0; i < param.size(); ++i)
      if (param(i) != o.param(i)) return param(i) < o.param(i);
    return false;
  }
};

}  // namespace

SampleSet make_sample_set(const SamplingSpec& spec, std::uint64_t seed, Index m,
                          Index p) {
  std::vector<Cplx> freqs = log_freq_grid(spec.freq_min, spec.freq_max, spec.num_freq);
  const bool parametric = !spec.param_box.empty();
  for (const auto& iv : spec.param_box)
    if (!(iv[1] >= iv[0])) throw std::invalid_argument("empty parameter interval");
  std::vector<Eigen::VectorXd> params;
  Rng param_rng(Rng::derive_seed(seed, 0));
  if (parametric) {
    int np = spec.pairing == SamplingSpec::Pairing::Zip ? spec.num_freq : spec.num_param;
    if (spec.pairing == SamplingSpec::Pairing::Zip && spec.num_param > 0 &&
        spec.num_param != spec.num_freq) {
      std::ostringstream os;
      os << "zip pairing needs num_freq == num_param (got " << spec.num_freq << " and "
         << spec.num_param << "); use tensor pairing for unequal counts";
      throw std::invalid_argument(os.str());
    }
    // same draws as random_param_grid(box, np, derive_seed(seed, 0));
    // collision resampling below continues this stream
    params.reserve(np);
    for (int k = 0; k < np; ++k) {
      Eigen::VectorXd v(spec.param_box.size());
      for (std::size_t j = 0; j < spec.param_box.size(); ++j)
        v(j) = param_rng.uniform(spec.param_box[j][0], spec.param_box[j][1]);
      params.push_back(std::move(v));
    }
  } else {
    params.emplace_back(0);  // single empty parameter vector
  }

  SampleSet set;
  set.seed = seed;
  set.spec = spec;

  std::set<PointKey> seen;
  auto push_point = [&](Cplx sigma, Eigen::VectorXd pv) {
    // resample the parameter draw on (sigma, p) collision
    for (int attempt = 0; attempt < 100; ++attempt) {
      if (seen.insert({sigma, pv}).second) break;
      if (!parametric || attempt == 99)
        throw std::runtime_error("could not generate distinct sample points");
      for (Index j = 0; j < pv.size(); ++j)
        pv(j) = param_rng.uniform(spec.param_box[j][0], spec.param_box[j][1]);
    }
    set.points.push_back({sigma, std::move(pv), std::nullopt, std::nullopt});
  };

  if (!parametric || spec.pairing == SamplingSpec::Pairing::Zip) {
    for (std::size_t j = 0; j < freqs.size(); ++j)
      push_point(freqs[j], parametric ? params[j] : params[0]);
  } else {
    for (const auto& pv : params)
      for (const auto& f : freqs) push_point(f, pv);
  }

  if (spec.tangential) {
    if (m < 1 || p < 1)
      throw std::invalid_argument(
          "tangential sampling needs the system input/output sizes");
    auto right = random_tangent_dirs(static_cast<int>(m),
                                     static_cast<int>(set.points.size()),
                                     Rng::derive_seed(seed, 1));
    auto left = random_tangent_dirs(static_cast<int>(p),
                                    static_cast<int>(set.points.size()),
                                    Rng::derive_seed(seed, 2));
    for (std::size_t k = 0; k < set.points.size(); ++k) {
      set.points[k].right_dir = right[k];
      set.points[k].left_dir = left[k];
    }
  }
  return set;
}

}  // namespace drop
