// SPDX-License-Identifier: Apache-2.0
#include "drop/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace drop {

namespace {

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& msg) {
  throw IoError(name + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_value(const std::string& tok, const std::string& name, std::size_t line) {
  double v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    fail(name, line, "malformed numeric value '" + tok + "'");
  return v;
}

long long parse_index(const std::string& tok, const std::string& name, std::size_t line) {
  long long v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    fail(name, line, "malformed index '" + tok + "'");
  return v;
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MatrixVariant read_matrix(std::istream& in, const std::string& name) {
  std::string header;
  if (!std::getline(in, header)) fail(name, 1, "empty file");
  std::transform(header.begin(), header.end(), header.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::vector<std::string> head = split_ws(header);
  if (head.size() < 4 || head[0] != "%%matrixmarket" || head[1] != "matrix")
    fail(name, 1, "missing %%MatrixMarket matrix header");
  const std::string& storage = head[2];
  const std::string& field = head[3];
  const std::string symmetry = head.size() > 4 ? head[4] : "general";
  if (storage != "coordinate" && storage != "array")
    fail(name, 1, "unsupported storage '" + storage + "'");
  if (field != "real" && field != "complex" && field != "integer")
    fail(name, 1, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    fail(name, 1, "unsupported symmetry '" + symmetry + "'");
  const bool complex_field = field == "complex";
  const std::size_t vals_per_entry = complex_field ? 2 : 1;

  // size line: first non-comment line
  std::string linebuf;
  std::size_t lineno = 1;
  for (;;) {
    if (!std::getline(in, linebuf)) fail(name, lineno, "missing size line");
    ++lineno;
    if (!linebuf.empty() && linebuf[0] != '%') break;
  }
  std::vector<std::string> size_tok = split_ws(linebuf);

  if (storage == "coordinate") {
    if (size_tok.size() != 3) fail(name, lineno, "coordinate size line needs rows cols nnz");
    long long rows = parse_index(size_tok[0], name, lineno);
    long long cols = parse_index(size_tok[1], name, lineno);
    long long nnz = parse_index(size_tok[2], name, lineno);
    if (rows < 0 || cols < 0 || nnz < 0) fail(name, lineno, "negative dimension");
    std::vector<Eigen::Triplet<Cplx>> trips;
    trips.reserve(static_cast<std::size_t>(nnz) * (symmetry == "symmetric" ? 2 : 1));
    for (long long k = 0; k < nnz; ++k) {
      if (!std::getline(in, linebuf)) fail(name, lineno + 1, "unexpected end of file");
      ++lineno;
      if (!linebuf.empty() && linebuf[0] == '%') {
        --k;
        continue;
      }
      std::vector<std::string> tok = split_ws(linebuf);
      if (tok.empty()) {
        --k;
        continue;
      }
      if (tok.size() != 2 + vals_per_entry)
        fail(name, lineno, "expected 'row col value' entry");
      long long i = parse_index(tok[0], name, lineno);
      long long j = parse_index(tok[1], name, lineno);
      if (i < 1 || i > rows || j < 1 || j > cols)
        fail(name, lineno,
             "entry (" + std::to_string(i) + "," + std::to_string(j) +
                 ") outside declared " + std::to_string(rows) + "x" +
                 std::to_string(cols) + " matrix");
      double re = parse_value(tok[2], name, lineno);
      double im = complex_field ? parse_value(tok[3], name, lineno) : 0.0;
      trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), Cplx(re, im));
      if (symmetry == "symmetric" && i != j)
        trips.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), Cplx(re, im));
    }
    SparseMat m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    return MatrixVariant(std::move(m));
  }

  // array (dense, column-major)
  if (size_tok.size() != 2) fail(name, lineno, "array size line needs rows cols");
  long long rows = parse_index(size_tok[0], name, lineno);
  long long cols = parse_index(size_tok[1], name, lineno);
  if (rows < 0 || cols < 0) fail(name, lineno, "negative dimension");
  DenseMat m(rows, cols);
  const bool symmetric = symmetry == "symmetric";
  for (long long j = 0; j < cols; ++j) {
    for (long long i = symmetric ? j : 0; i < rows; ++i) {
      std::vector<std::string> tok;
      do {
        if (!std::getline(in, linebuf)) fail(name, lineno + 1, "unexpected end of file");
        ++lineno;
        if (!linebuf.empty() && linebuf[0] == '%') {
          tok.clear();
          continue;
        }
        tok = split_ws(linebuf);
      } while (tok.empty());
      if (tok.size() != vals_per_entry) fail(name, lineno, "expected one entry per line");
      double re = parse_value(tok[0], name, lineno);
      double im = complex_field ? parse_value(tok[1], name, lineno) : 0.0;
      m(i, j) = Cplx(re, im);
      if (symmetric && i != j) m(j, i) = Cplx(re, im);
    }
  }
  return MatrixVariant(std::move(m));
}

MatrixVariant read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path.string() + "'");
  return read_matrix(in, path.string());
}

void write_matrix(std::ostream& out, const MatrixVariant& m) {
  const bool complex_field = !m.is_real();
  const char* field = complex_field ? "complex" : "real";
  if (m.is_sparse()) {
    const SparseMat& s = m.sparse();
    out << "%%MatrixMarket matrix coordinate " << field << " general\n";
    out << s.rows() << ' ' << s.cols() << ' ' << s.nonZeros() << '\n';
    for (int k = 0; k < s.outerSize(); ++k) {
      for (SparseMat::InnerIterator it(s, k); it; ++it) {
        out << (it.row() + 1) << ' ' << (it.col() + 1) << ' '
            << format_full(it.value().real());
        if (complex_field) out << ' ' << format_full(it.value().imag());
        out << '\n';
      }
    }
    return;
  }
  const DenseMat& d = m.dense();
  out << "%%MatrixMarket matrix array " << field << " general\n";
  out << d.rows() << ' ' << d.cols() << '\n';
  for (Index j = 0; j < d.cols(); ++j) {
    for (Index i = 0; i < d.rows(); ++i) {
      out << format_full(d(i, j).real());
      if (complex_field) out << ' ' << format_full(d(i, j).imag());
      out << '\n';
    }
  }
}

void write_matrix(const std::filesystem::path& path, const MatrixVariant& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_matrix(out, m);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::vector<ManifestTerm> read_terms(const nlohmann::json& j, const std::string& key,
                                     const std::string& name) {
  std::vector<ManifestTerm> out;
  if (!j.contains(key)) throw IoError(name + ": missing '" + key + "'");
  for (const auto& t : j.at(key)) {
    ManifestTerm term;
    term.coeff = t.at("coeff").get<std::string>();
    term.matrix_path = t.at("matrix").get<std::string>();
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest '" + path.string() + "': " + e.what());
  }
  const std::string name = path.string();
  try {
    Manifest m;
    m.name = j.value("name", std::string("unnamed"));
    m.n = j.at("n").get<Index>();
    m.m = j.at("m").get<Index>();
    m.p = j.at("p").get<Index>();
    m.d = j.value("d", Index(0));
    auto fr = j.at("frequency_range");
    m.freq_min = fr.at(0).get<double>();
    m.freq_max = fr.at(1).get<double>();
    if (j.contains("parameter_box")) {
      for (const auto& iv : j.at("parameter_box"))
        m.param_box.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
    m.k_terms = read_terms(j, "k_terms", name);
    m.b_terms = read_terms(j, "b_terms", name);
    m.c_terms = read_terms(j, "c_terms", name);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest '" + name + "': " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  nlohmann::json j;
  j["name"] = manifest.name;
  j["n"] = manifest.n;
  j["m"] = manifest.m;
  j["p"] = manifest.p;
  j["d"] = manifest.d;
  j["frequency_range"] = {manifest.freq_min, manifest.freq_max};
  nlohmann::json box = nlohmann::json::array();
  for (const auto& iv : manifest.param_box) box.push_back({iv[0], iv[1]});
  j["parameter_box"] = box;
  auto dump_terms = [](const std::vector<ManifestTerm>& terms) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : terms) arr.push_back({{"coeff", t.coeff}, {"matrix", t.matrix_path}});
    return arr;
  };
  j["k_terms"] = dump_terms(manifest.k_terms);
  j["b_terms"] = dump_terms(manifest.b_terms);
  j["c_terms"] = dump_terms(manifest.c_terms);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace drop
