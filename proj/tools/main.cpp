// SPDX-License-Identifier: Apache-2.0
//
// dropmor command line: structure-preserving model order reduction of
// generalized linear parametric systems H(s,p) = C(s,p) K(s,p)^{-1} B(s,p).
//
//   dropmor reduce --bench demo --nfreq 10 --nparam 10 --tol 1e-8 --out run/
//   dropmor sweep  --bench demo run/reduced.json --out run/
//   dropmor verify --bench demo run/reduced.json
//
// Exit codes: 0 success / verification pass, 1 verification failure,
// 2 usage or I/O error.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drop/cli.hpp"

namespace {

std::vector<std::array<double, 2>> parse_pbox(const std::string& text) {
  // "lo:hi[,lo:hi...]", one interval per parameter
  std::vector<std::array<double, 2>> box;
  std::istringstream iss(text);
  std::string part;
  while (std::getline(iss, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--pbox", "expected lo:hi[,lo:hi...]");
    box.push_back({std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1))});
  }
  if (box.empty()) throw CLI::ValidationError("--pbox", "empty box");
  return box;
}

struct Flags {
  std::string bench, manifest, config, pbox, out;
  std::int64_t size = 0, nfreq = 0, nparam = 0, order = 0;
  std::uint64_t seed = 0;
  double fmin = 0, fmax = 0, tol = 0, itol = 0, htol = 0;
  bool one_sided = false, tangential = false, tensor = false;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--bench", f.bench, "builtin benchmark: demo, delay, heat");
  cmd->add_option("--manifest", f.manifest, "system manifest path");
  cmd->add_option("--size", f.size, "benchmark size (delay n, heat grid)");
  cmd->add_option("--config", f.config, "JSON config file (flags override it)");
  cmd->add_option("--nfreq", f.nfreq, "number of frequency points");
  cmd->add_option("--fmin", f.fmin, "lower frequency bound");
  cmd->add_option("--fmax", f.fmax, "upper frequency bound");
  cmd->add_option("--nparam", f.nparam, "number of parameter points");
  cmd->add_option("--pbox", f.pbox, "parameter box lo:hi[,lo:hi...]");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory");
}

drop::RunConfig merge(const CLI::App* cmd, const Flags& f) {
  drop::RunConfig c;
  if (cmd->count("--config")) c = drop::RunConfig::from_json_file(f.config);
  auto set = [&](const char* flag, auto&& apply) {
    if (cmd->count(flag)) apply();
  };
  set("--bench", [&] { c.bench = f.bench; c.manifest.clear(); });
  set("--manifest", [&] { c.manifest = f.manifest; c.bench.clear(); });
  set("--size", [&] { c.size = f.size; });
  set("--nfreq", [&] { c.nfreq = static_cast<int>(f.nfreq); });
  set("--fmin", [&] { c.fmin = f.fmin; });
  set("--fmax", [&] { c.fmax = f.fmax; });
  set("--nparam", [&] { c.nparam = static_cast<int>(f.nparam); });
  set("--pbox", [&] { c.pbox = parse_pbox(f.pbox); });
  set("--seed", [&] { c.seed = f.seed; });
  set("--out", [&] { c.out_dir = f.out; });
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving model order reduction toolkit"};
  app.require_subcommand(1);

  Flags f;
  CLI::App* reduce = app.add_subcommand("reduce", "build a reduced-order system");
  add_common_flags(reduce, f);
  reduce->add_option("--order", f.order, "fixed reduced order r");
  reduce->add_option("--tol", f.tol, "relative singular value tolerance");
  reduce->add_flag("--one-sided", f.one_sided, "one-sided projection (W := V)");
  reduce->add_flag("--tangential", f.tangential, "tangential directions");
  reduce->add_flag("--tensor", f.tensor, "tensor-product frequency/parameter pairing");

  std::string reduced_path;
  CLI::App* sweep = app.add_subcommand("sweep", "error sweep against a reduction");
  add_common_flags(sweep, f);
  sweep->add_option("reduced", reduced_path, "reduced-system manifest")->required();

  CLI::App* verify =
      app.add_subcommand("verify", "interpolation/Hermite verification");
  add_common_flags(verify, f);
  verify->add_option("reduced", reduced_path, "reduced-system manifest")->required();
  verify->add_option("--itol", f.itol, "interpolation residual tolerance");
  verify->add_option("--htol", f.htol, "Hermite residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : drop::kUsage;
  }

  try {
    if (reduce->parsed()) {
      drop::RunConfig c = merge(reduce, f);
      if (reduce->count("--order")) c.order = static_cast<int>(f.order);
      if (reduce->count("--tol")) c.tol = f.tol;
      if (reduce->count("--one-sided")) c.one_sided = true;
      if (reduce->count("--tangential")) c.tangential = true;
      if (reduce->count("--tensor")) c.tensor = true;
      return drop::cmd_reduce(c);
    }
    if (sweep->parsed()) {
      return drop::cmd_sweep(merge(sweep, f), reduced_path);
    }
    drop::RunConfig c = merge(verify, f);
    if (verify->count("--itol")) c.interp_tol = f.itol;
    if (verify->count("--htol")) c.hermite_tol = f.htol;
    return drop::cmd_verify(c, reduced_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return drop::kUsage;
  }
}
