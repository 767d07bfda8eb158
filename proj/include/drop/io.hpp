// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "drop/types.hpp"

namespace drop {

/// Raised on malformed matrix or manifest files. Messages carry the path
/// and, for entry-level problems, the 1-based line number.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Read a matrix in the coordinate/array text exchange format
/// ("%%MatrixMarket" header). Coordinate files load as sparse storage and
/// are never materialized dense; array files load dense. Fields `real`,
/// `integer` and `complex` are supported, symmetries `general` and
/// `symmetric`. Indices in coordinate files are 1-based.
MatrixVariant read_matrix(const std::filesystem::path& path);

/// Write a matrix in the same format. Sparse storage writes a coordinate
/// file, dense an array file; real-valued data writes the `real` field.
/// Entries are printed with 17 significant digits, so write -> read
/// round-trips every finite value exactly.
void write_matrix(const std::filesystem::path& path, const MatrixVariant& m);

/// Stream variants (used by the file functions; handy for tests).
MatrixVariant read_matrix(std::istream& in, const std::string& name);
void write_matrix(std::ostream& out, const MatrixVariant& m);

// ---------------------------------------------------------------------------
// System manifest: a JSON document declaring dimensions, frequency range,
// parameter box and the per-role term lists {coeff DSL string, matrix file}.

struct ManifestTerm {
  std::string coeff;        // DSL text
  std::string matrix_path;  // relative to the manifest file
};

struct Manifest {
  std::string name;
  Index n = 0, m = 0, p = 0, d = 0;
  double freq_min = 0, freq_max = 0;
  std::vector<std::array<double, 2>> param_box;  // size d
  std::vector<ManifestTerm> k_terms, b_terms, c_terms;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Round-trippable double formatting (17 significant digits) shared by all
/// text emitters so outputs are byte-reproducible.
std::string format_full(double v);

}  // namespace drop
