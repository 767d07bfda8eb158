// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drop/system.hpp"

namespace drop {

/// Everything a run needs; a run is reproducible from its RunConfig alone.
/// Serializable to/from JSON (the --config file and the run.json echo).
struct RunConfig {
  // system source: exactly one of bench / manifest
  std::string bench;
  std::string manifest;
  Index size = 0;  // benchmark size override (delay n, heat grid_k)

  // sampling
  int nfreq = 100;
  double fmin = 0;  // 0 = system default
  double fmax = 0;
  int nparam = 0;  // 0 = match nfreq (zip pairing)
  std::vector<std::array<double, 2>> pbox;  // empty = system default
  std::uint64_t seed = 0;
  bool tangential = false;
  bool tensor = false;

  // reduction policy: order > 0 wins, else rel tolerance
  int order = 0;
  double tol = 1e-8;
  bool one_sided = false;

  // verification tolerances
  double interp_tol = 1e-8;
  double hermite_tol = 1e-5;

  std::string out_dir = "out";

  std::string to_json() const;
  static RunConfig from_json_file(const std::filesystem::path& path);
  /// Merge non-default fields of `other` over *this (flags override the
  /// config file).
};

/// Exit codes shared by all commands: 0 success / verification pass,
/// 1 verification failure, 2 usage or I/O error.
enum ExitCode { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

/// reduce: sample -> build V/W -> realify/orthonormalize -> stacked SVD ->
/// truncate -> project. Writes reduced.json (+ matrix files), svd.csv and
/// run.json under config.out_dir.
int cmd_reduce(const RunConfig& config);

/// sweep: error grid of the configured system against a reduced manifest.
/// Writes sweep.csv and summary.json.
int cmd_sweep(const RunConfig& config, const std::string& reduced_path);

/// verify: interpolation + Hermite conditions of the reduced system at the
/// configured sample set.
int cmd_verify(const RunConfig& config, const std::string& reduced_path);

/// Resolve the configured system (benchmark or manifest).
StructuredSystem resolve_system(const RunConfig& config);

}  // namespace drop
