// SPDX-License-Identifier: Apache-2.0
#include "drop/benchmarks.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace drop {
namespace bench {

StructuredSystem demo_system() {
  Eigen::Matrix3d a0;
  a0 << -2, 0, 0, 0, -1, 0, 0, 0, -2;
  Eigen::Matrix3d a1;
  a1 << 0, 1, 0, -1, 0, 0, 1, 0, 0;
  Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  Eigen::MatrixXd b(3, 1);
  b << 1, 0, 1;
  Eigen::MatrixXd c(1, 3);
  c << 1, 1, 0;

  std::vector<StructuredTerm> k_terms;
  k_terms.push_back({CoeffExpr::parse("s"), MatrixVariant(Eigen::MatrixXd(id))});
  k_terms.push_back({CoeffExpr::parse("-1"), MatrixVariant(Eigen::MatrixXd(a0))});
  k_terms.push_back({CoeffExpr::parse("-p1"), MatrixVariant(Eigen::MatrixXd(a1))});
  std::vector<StructuredTerm> b_terms;
  b_terms.push_back({CoeffExpr::parse("1"), MatrixVariant(b)});
  std::vector<StructuredTerm> c_terms;
  c_terms.push_back({CoeffExpr::parse("1"), MatrixVariant(c)});

  SystemMetadata meta;
  meta.name = "demo";
  meta.freq_min = 1e-4;
  meta.freq_max = 10.0;
  meta.param_box = {{-10.0, 10.0}};
  return StructuredSystem(3, 1, 1, 1, std::move(k_terms), std::move(b_terms),
                          std::move(c_terms), std::move(meta));
}

StructuredSystem delay_system(Index n, double mu, double zeta, double tau) {
  if (n < 2) throw std::invalid_argument("delay_system: n >= 2 required");
  if (!(tau > 0)) throw std::invalid_argument("delay_system: tau > 0 required");
  if (zeta == 0) throw std::invalid_argument("delay_system: zeta must be nonzero");

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> t_entries;
  t_entries.emplace_back(0, 0, 1.0);
  t_entries.emplace_back(n - 1, n - 1, 1.0);
  for (Index i = 0; i + 1 < n; ++i) {
    t_entries.emplace_back(i + 1, i, 1.0);
    t_entries.emplace_back(i, i + 1, 1.0);
  }
  Eigen::SparseMatrix<double> t(n, n);
  t.setFromTriplets(t_entries.begin(), t_entries.end());
  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();

  Eigen::SparseMatrix<double> e = mu * identity + t;
  Eigen::SparseMatrix<double> t_shift = t - mu * identity;
  Eigen::SparseMatrix<double> a = (1.0 / tau) * (1.0 / zeta + 1.0) * t_shift;
  Eigen::SparseMatrix<double> a_tau = (1.0 / tau) * (1.0 / zeta - 1.0) * t_shift;

  Eigen::SparseMatrix<double> b(n, 1);
  b.insert(0, 0) = 1.0;
  b.insert(1, 0) = 1.0;
  Eigen::SparseMatrix<double> c(1, n);
  c.insert(0, 0) = 1.0;
  c.insert(0, 1) = 1.0;

  std::vector<StructuredTerm> k_terms;
  k_terms.push_back({CoeffExpr::parse("s"), MatrixVariant(e)});
  k_terms.push_back({CoeffExpr::parse("-1"), MatrixVariant(a)});
  k_terms.push_back(
      {CoeffExpr::parse("-exp(-" + format_full(tau) + "*s)"), MatrixVariant(a_tau)});
  std::vector<StructuredTerm> b_terms;
  b_terms.push_back({CoeffExpr::parse("1"), MatrixVariant(b)});
  std::vector<StructuredTerm> c_terms;
  c_terms.push_back({CoeffExpr::parse("1"), MatrixVariant(c)});

  SystemMetadata meta;
  meta.name = "delay";
  meta.freq_min = 1e-2;
  meta.freq_max = 1e4;
  return StructuredSystem(n, 1, 1, 0, std::move(k_terms), std::move(b_terms),
                          std::move(c_terms), std::move(meta));
}

StructuredSystem heat_fading_memory(Index grid_k, double gamma) {
  if (grid_k < 4) throw std::invalid_argument("heat_fading_memory: grid_k >= 4");
  const Index n = grid_k * grid_k;
  const double h = 1.0 / static_cast<double>(grid_k + 1);
  const double inv_h2 = 1.0 / (h * h);

  auto node = [grid_k](Index i, Index j) { return j * grid_k + i; };  // 0-based
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> a_entries;
  a_entries.reserve(5 * n);
  for (Index j = 0; j < grid_k; ++j) {
    for (Index i = 0; i < grid_k; ++i) {
      a_entries.emplace_back(node(i, j), node(i, j), -4.0 * inv_h2);
      if (i > 0) a_entries.emplace_back(node(i, j), node(i - 1, j), inv_h2);
      if (i + 1 < grid_k) a_entries.emplace_back(node(i, j), node(i + 1, j), inv_h2);
      if (j > 0) a_entries.emplace_back(node(i, j), node(i, j - 1), inv_h2);
      if (j + 1 < grid_k) a_entries.emplace_back(node(i, j), node(i, j + 1), inv_h2);
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(a_entries.begin(), a_entries.end());
  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();

  Eigen::SparseMatrix<double> b(n, 1);
  Eigen::SparseMatrix<double> c(1, n);
  for (Index j = 0; j < grid_k; ++j) {
    for (Index i = 0; i < grid_k; ++i) {
      const double x = (i + 1) * h, y = (j + 1) * h;
      if (x >= 0.15 && x <= 0.25 && y >= 0.2 && y <= 0.3) b.insert(node(i, j), 0) = 1.0;
      c.insert(0, node(i, j)) = h * h;
    }
  }

  std::vector<StructuredTerm> k_terms;
  k_terms.push_back({CoeffExpr::parse("s"), MatrixVariant(identity)});
  k_terms.push_back({CoeffExpr::parse("-1"), MatrixVariant(a)});
  k_terms.push_back(
      {CoeffExpr::parse("1/(s+" + format_full(gamma) + ")"), MatrixVariant(a)});
  std::vector<StructuredTerm> b_terms;
  b_terms.push_back({CoeffExpr::parse("1"), MatrixVariant(b)});
  std::vector<StructuredTerm> c_terms;
  c_terms.push_back({CoeffExpr::parse("1"), MatrixVariant(c)});

  SystemMetadata meta;
  meta.name = "heat";
  meta.freq_min = 1e-2;
  meta.freq_max = 1e2;
  return StructuredSystem(n, 1, 1, 0, std::move(k_terms), std::move(b_terms),
                          std::move(c_terms), std::move(meta));
}

StructuredSystem by_name(const std::string& name, const BenchmarkOptions& opts) {
  if (name == "demo") return demo_system();
  if (name == "delay") return delay_system(opts.size > 0 ? opts.size : 500);
  if (name == "heat") return heat_fading_memory(opts.size > 0 ? opts.size : 32);
  throw std::invalid_argument("unknown benchmark '" + name +
                              "' (available: demo, delay, heat)");
}

}  // namespace bench

StructuredSystem load_system(const std::filesystem::path& manifest_path) {
  Manifest man = read_manifest(manifest_path);
  const std::filesystem::path base = manifest_path.parent_path();

  auto load_terms = [&](const std::vector<ManifestTerm>& terms, const char* role) {
    std::vector<StructuredTerm> out;
    out.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      CoeffExpr coeff;
      try {
        coeff = CoeffExpr::parse(terms[i].coeff, static_cast<int>(man.d));
      } catch (const ParseError& e) {
        throw IoError(manifest_path.string() + ": " + role + "-term " +
                      std::to_string(i) + ": " + e.what());
      }
      MatrixVariant m = read_matrix(base / terms[i].matrix_path);
      out.push_back({std::move(coeff), std::move(m)});
    }
    return out;
  };

  SystemMetadata meta;
  meta.name = man.name;
  meta.freq_min = man.freq_min;
  meta.freq_max = man.freq_max;
  meta.param_box = man.param_box;
  StructuredSystem sys(man.n, man.m, man.p, man.d, load_terms(man.k_terms, "K"),
                       load_terms(man.b_terms, "B"), load_terms(man.c_terms, "C"),
                       std::move(meta));

  // probe-evaluate K once inside the declared ranges; singularity there is
  // suspicious but not necessarily fatal
  const Cplx s(0.0, std::sqrt(man.freq_min * man.freq_max));
  Eigen::VectorXd pv = Eigen::VectorXd::Zero(sys.num_params());
  for (std::size_t j = 0; j < man.param_box.size(); ++j)
    pv(j) = 0.5 * (man.param_box[j][0] + man.param_box[j][1]);
  try {
    KSolver probe(sys, s, as_span(pv));
  } catch (const SingularSystemError&) {
    // leave it to the pipeline's skip-with-warning handling
  }
  return sys;
}

std::filesystem::path save_system(const StructuredSystem& sys,
                                  const std::filesystem::path& dir,
                                  const std::string& basename) {
  std::filesystem::create_directories(dir);
  Manifest man;
  man.name = sys.metadata().name;
  man.n = sys.n();
  man.m = sys.num_inputs();
  man.p = sys.num_outputs();
  man.d = sys.num_params();
  man.freq_min = sys.metadata().freq_min;
  man.freq_max = sys.metadata().freq_max;
  man.param_box = sys.metadata().param_box;

  auto dump_terms = [&](const std::vector<StructuredTerm>& terms, const char* role) {
    std::vector<ManifestTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::string file = basename + "_" + role + std::to_string(i) + ".mtx";
      write_matrix(dir / file, terms[i].matrix);
      out.push_back({terms[i].coeff.to_string(), file});
    }
    return out;
  };
  man.k_terms = dump_terms(sys.k_terms(), "k");
  man.b_terms = dump_terms(sys.b_terms(), "b");
  man.c_terms = dump_terms(sys.c_terms(), "c");

  std::filesystem::path manifest_path = dir / (basename + ".json");
  write_manifest(manifest_path, man);
  return manifest_path;
}

}  // namespace drop
