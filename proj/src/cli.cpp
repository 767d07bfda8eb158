// SPDX-License-Identifier: Apache-2.0
#include "drop/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "drop/analysis.hpp"
#include "drop/benchmarks.hpp"
#include "drop/io.hpp"
#include "drop/projection.hpp"
#include "drop/reduction.hpp"
#include "drop/sampling.hpp"

namespace drop {

namespace {

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["bench"] = c.bench;
  j["manifest"] = c.manifest;
  j["size"] = c.size;
  j["nfreq"] = c.nfreq;
  j["fmin"] = c.fmin;
  j["fmax"] = c.fmax;
  j["nparam"] = c.nparam;
  nlohmann::json box = nlohmann::json::array();
  for (const auto& iv : c.pbox) box.push_back({iv[0], iv[1]});
  j["pbox"] = box;
  j["seed"] = c.seed;
  j["tangential"] = c.tangential;
  j["tensor"] = c.tensor;
  j["order"] = c.order;
  j["tol"] = c.tol;
  j["one_sided"] = c.one_sided;
  j["interp_tol"] = c.interp_tol;
  j["hermite_tol"] = c.hermite_tol;
  j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace

std::string RunConfig::to_json() const { return config_json(*this).dump(2); }

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config '" + path.string() + "': " + e.what());
  }
  RunConfig c;
  c.bench = j.value("bench", c.bench);
  c.manifest = j.value("manifest", c.manifest);
  c.size = j.value("size", c.size);
  c.nfreq = j.value("nfreq", c.nfreq);
  c.fmin = j.value("fmin", c.fmin);
  c.fmax = j.value("fmax", c.fmax);
  c.nparam = j.value("nparam", c.nparam);
  if (j.contains("pbox"))
    for (const auto& iv : j.at("pbox"))
      c.pbox.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
  c.seed = j.value("seed", c.seed);
  c.tangential = j.value("tangential", c.tangential);
  c.tensor = j.value("tensor", c.tensor);
  c.order = j.value("order", c.order);
  c.tol = j.value("tol", c.tol);
  c.one_sided = j.value("one_sided", c.one_sided);
  c.interp_tol = j.value("interp_tol", c.interp_tol);
  c.hermite_tol = j.value("hermite_tol", c.hermite_tol);
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

StructuredSystem resolve_system(const RunConfig& config) {
  if (!config.bench.empty() && !config.manifest.empty())
    throw std::invalid_argument("give either --bench or --manifest, not both");
  if (!config.bench.empty())
    return bench::by_name(config.bench, {config.size});
  if (!config.manifest.empty()) return load_system(config.manifest);
  throw std::invalid_argument("no system source: give --bench or --manifest");
}

namespace {

SamplingSpec sampling_spec(const RunConfig& config, const StructuredSystem& sys) {
  SamplingSpec spec;
  spec.freq_min = config.fmin > 0 ? config.fmin : sys.metadata().freq_min;
  spec.freq_max = config.fmax > 0 ? config.fmax : sys.metadata().freq_max;
  spec.num_freq = config.nfreq;
  spec.param_box = config.pbox.empty() ? sys.metadata().param_box : config.pbox;
  spec.num_param = config.nparam;
  spec.tangential = config.tangential;
  spec.pairing =
      config.tensor ? SamplingSpec::Pairing::Tensor : SamplingSpec::Pairing::Zip;
  return spec;
}

std::vector<Eigen::VectorXd> sweep_params(const RunConfig& config,
                                          const StructuredSystem& sys) {
  const auto& box =
      config.pbox.empty() ? sys.metadata().param_box : config.pbox;
  std::vector<Eigen::VectorXd> params;
  if (box.empty()) {
    params.emplace_back(0);
    return params;
  }
  int np = config.nparam > 0 ? config.nparam : 20;
  if (box.size() == 1) {
    // single parameter: linearly spaced values across the box
    for (int k = 0; k < np; ++k) {
      Eigen::VectorXd v(1);
      v(0) = np == 1 ? box[0][0]
                     : box[0][0] + (box[0][1] - box[0][0]) * k / (np - 1);
      params.push_back(std::move(v));
    }
    return params;
  }
  return random_param_grid(box, np, Rng::derive_seed(config.seed, 3));
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

int cmd_reduce(const RunConfig& config) {
  StructuredSystem sys = resolve_system(config);
  SamplingSpec spec = sampling_spec(config, sys);
  SampleSet samples =
      make_sample_set(spec, config.seed, sys.num_inputs(), sys.num_outputs());

  ProjectionPair pair = build_projection(sys, samples);
  TruncationPolicy policy = config.order > 0 ? TruncationPolicy::fixed(config.order)
                                             : TruncationPolicy::relative(config.tol);
  ProjectionSide side =
      config.one_sided ? ProjectionSide::OneSided : ProjectionSide::TwoSided;
  ReduceResult result = drop_reduce(sys, pair, policy, side);

  const std::filesystem::path out(config.out_dir);
  std::filesystem::create_directories(out);
  save_system(result.reduced, out, "reduced");

  std::ostringstream svd_csv;
  svd_csv << "index,sv_left,sv_right\n";
  const Index rows = std::max(result.report.sv_left.size(), result.report.sv_right.size());
  for (Index i = 0; i < rows; ++i) {
    svd_csv << i << ',';
    if (i < result.report.sv_left.size()) svd_csv << format_full(result.report.sv_left(i));
    svd_csv << ',';
    if (i < result.report.sv_right.size())
      svd_csv << format_full(result.report.sv_right(i));
    svd_csv << '\n';
  }
  write_text(out / "svd.csv", svd_csv.str());

  nlohmann::json run;
  run["config"] = config_json(config);
  run["chosen_r"] = result.report.chosen_r;
  run["num_sample_points"] = samples.points.size();
  run["orthonormalized_bases"] = result.report.orthonormalized_bases;
  run["realified_bases"] = result.report.realified_bases;
  nlohmann::json ranks;
  for (const auto& [tol, rank] : result.report.numerical_rank_at)
    ranks[format_full(tol)] = rank;
  run["numerical_rank_at"] = ranks;
  std::vector<std::string> warnings = pair.warnings;
  warnings.insert(warnings.end(), result.report.warnings.begin(),
                  result.report.warnings.end());
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  run["warnings"] = warnings;
  write_text(out / "run.json", run.dump(2) + "\n");

  std::cout << "reduced '" << sys.metadata().name << "' (n=" << sys.n() << ") to r="
            << result.report.chosen_r << "; outputs in " << out.string() << "\n";
  return kOk;
}

int cmd_sweep(const RunConfig& config, const std::string& reduced_path) {
  StructuredSystem sys = resolve_system(config);
  StructuredSystem red = load_system(reduced_path);
  if (red.num_inputs() != sys.num_inputs() || red.num_outputs() != sys.num_outputs())
    throw std::invalid_argument("system/reduction input-output dimensions differ");

  const double fmin = config.fmin > 0 ? config.fmin : sys.metadata().freq_min;
  const double fmax = config.fmax > 0 ? config.fmax : sys.metadata().freq_max;
  std::vector<Cplx> freqs = log_freq_grid(fmin, fmax, config.nfreq);
  std::vector<Eigen::VectorXd> params = sweep_params(config, sys);

  ErrorReport report = sweep_error(sys, red, freqs, params);
  const std::filesystem::path out(config.out_dir);
  std::filesystem::create_directories(out);
  std::ostringstream csv;
  report.write_csv(csv, /*include_magnitude=*/true);
  write_text(out / "sweep.csv", csv.str());
  write_text(out / "summary.json", report.summary_json() + "\n");

  std::cout << "sweep max_abs=" << report.max_abs << " max_rel=" << report.max_rel
            << " l2=" << report.l2_err << "; outputs in " << out.string() << "\n";
  return kOk;
}

int cmd_verify(const RunConfig& config, const std::string& reduced_path) {
  StructuredSystem sys = resolve_system(config);
  StructuredSystem red = load_system(reduced_path);
  if (red.num_inputs() != sys.num_inputs() || red.num_outputs() != sys.num_outputs())
    throw std::invalid_argument("system/reduction input-output dimensions differ");

  SamplingSpec spec = sampling_spec(config, sys);
  SampleSet samples =
      make_sample_set(spec, config.seed, sys.num_inputs(), sys.num_outputs());

  InterpolationReport interp =
      verify_interpolation(sys, red, samples, config.interp_tol);
  HermiteReport hermite = verify_hermite(sys, red, samples, config.hermite_tol);

  std::cout << "interpolation: max residual " << interp.max_residual << " (tol "
            << config.interp_tol << ") -> " << (interp.pass ? "pass" : "FAIL") << "\n";
  if (!interp.pass)
    for (std::size_t j = 0; j < interp.residuals.size(); ++j)
      if (!(interp.residuals[j] <= config.interp_tol))
        std::cout << "  point " << j << ": residual " << interp.residuals[j] << "\n";
  std::cout << "hermite: max residual " << hermite.max_residual << " (tol "
            << config.hermite_tol << ") -> " << (hermite.pass ? "pass" : "FAIL")
            << "\n";
  for (const std::string& f : interp.failures) std::cout << "  " << f << "\n";
  for (const std::string& f : hermite.failures) std::cout << "  " << f << "\n";
  return interp.pass && hermite.pass ? kOk : kVerifyFailed;
}

}  // namespace drop
