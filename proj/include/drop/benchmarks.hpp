// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "drop/io.hpp"
#include "drop/system.hpp"

namespace drop {
namespace bench {

/// Order-3 single-parameter demo: K(s,p) = sI - A0 - p*A1 with
/// A0 = diag(-2,-1,-2), A1 = [[0,1,0],[-1,0,0],[1,0,0]], B = [1;0;1],
/// C = [1,1,0]. The parameter moves the imaginary parts of two
/// eigenvalues; the input-output behavior has order exactly 2.
StructuredSystem demo_system();

/// Delay system K(s) = sE - A - exp(-tau*s) A_tau built from the matrix T
/// with ones on the sub- and super-diagonal and at (1,1) and (n,n):
///   E = mu*I + T,
///   A     = (1/tau) (1/zeta + 1) (T - mu*I),
///   A_tau = (1/tau) (1/zeta - 1) (T - mu*I).
/// B has ones in entries 1 and 2, C = B^T. All matrices sparse.
StructuredSystem delay_system(Index n = 500, double mu = 5.0, double zeta = 0.01,
                              double tau = 1.0);

/// Heat conduction with fading memory, K(s) = sI - A + A/(s+gamma), with A
/// the 5-point Dirichlet Laplacian on a grid_k x grid_k interior mesh of
/// the unit square (h = 1/(grid_k+1), entries scaled by 1/h^2). B is the
/// indicator of nodes inside [0.15,0.25] x [0.2,0.3]; C integrates the
/// state (a row of cell areas h^2).
StructuredSystem heat_fading_memory(Index grid_k = 32, double gamma = 1.05);

struct BenchmarkOptions {
  Index size = 0;  // n for delay, grid_k for heat; 0 = default
};

/// Look up a generator by name: "demo", "delay", "heat".
StructuredSystem by_name(const std::string& name, const BenchmarkOptions& opts = {});

}  // namespace bench

/// Load a system from a manifest file: parses the manifest, loads each
/// matrix (paths resolved relative to the manifest), validates dimensions
/// and probe-evaluates K at one point of the declared ranges.
StructuredSystem load_system(const std::filesystem::path& manifest_path);

/// Write a system as a manifest plus one matrix file per term, all under
/// `dir` with the given basename. Returns the manifest path.
std::filesystem::path save_system(const StructuredSystem& sys,
                                  const std::filesystem::path& dir,
                                  const std::string& basename);

}  // namespace drop
