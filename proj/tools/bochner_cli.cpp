// Command-line front end for the preset experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bochner/error.hpp"
#include "bochner/experiment.hpp"
#include "bochner/run.hpp"

using namespace bochner;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  std::string p;
  std::string window;
  long long seed = -1;
  int threads = 0;
  bool dry_run = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "experiment config file");
  app->add_option("--preset", c.preset, "built-in preset: torus_constant, plane_radial_dip, plane_potential_bump");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--p", c.p, "comma separated tensor powers");
  app->add_option("--window", c.window, "gap window a,b");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--threads", c.threads, "p entries solved concurrently");
  app->add_flag("--dry-run", c.dry_run, "echo config and planned lattices, no solve");
}

std::vector<double> split_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_config, std::string("bad ") + what + " value '" + tok + "'");
    }
  }
  return out;
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else if (!c.preset.empty()) {
    cfg = parse_config("experiment = " + c.preset + "\n");
  } else {
    throw Error(ErrorCode::invalid_config, "need --config or --preset");
  }
  if (!c.out.empty()) cfg.output = c.out;
  if (!c.p.empty()) {
    cfg.p.clear();
    for (double v : split_numbers(c.p, "--p")) cfg.p.push_back(static_cast<int>(v));
  }
  if (!c.window.empty()) {
    const auto w = split_numbers(c.window, "--window");
    if (w.size() != 2) throw Error(ErrorCode::invalid_config, "--window needs a,b");
    cfg.window_lo = w[0];
    cfg.window_hi = w[1];
  }
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (c.threads > 0) cfg.threads = c.threads;
  validate_config(cfg);
  return cfg;
}

int dry_run(const ExperimentConfig& cfg) {
  std::cout << echo_config(cfg) << "\n# planned lattices\n" << describe_plan(cfg);
  return 0;
}

void print_entries(const RunReport& r) {
  for (const auto& e : r.entries) {
    std::printf("p=%d nx=%d sites=%ld h=%.5g spectrum=%ld", e.p, e.nx, static_cast<long>(e.sites), e.h,
                static_cast<long>(e.spectrum.size()));
    if (e.gap) std::printf(" gap=%ld", static_cast<long>(e.gap->size()));
    std::printf(" max_d=%.4g time=%.1fs", e.max_dist, e.seconds);
    if (!e.failure.empty()) std::printf(" FAILED: %s", e.failure.c_str());
    std::printf("\n");
  }
}

int print_assertions(const RunReport& r) {
  for (const auto& a : r.assertions) {
    std::printf("[%s] %s: %s%s%s\n", a.passed ? "PASS" : "FAIL", a.name.c_str(), a.measured.c_str(),
                a.note.empty() ? "" : " -- ", a.note.c_str());
  }
  return r.passed() ? 0 : 1;
}

int cmd_spectrum(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  if (c.dry_run) return dry_run(cfg);
  RunStages st;
  st.localization = false;
  st.trials = false;
  st.sigma = false;
  const RunReport r = run_experiment(cfg, st);
  write_report(r, st);
  print_entries(r);
  for (const auto& e : r.entries) {
    if (!e.failure.empty()) return 1;
  }
  return 0;
}

int cmd_sigma(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  if (c.dry_run) return dry_run(cfg);
  const RunReport r = run_experiment(cfg, RunStages::none());
  std::filesystem::create_directories(cfg.output);
  write_sigma_json((std::filesystem::path(cfg.output) / "sigma.json").string(), r);
  for (const auto& e : r.entries) {
    if (!e.failure.empty()) {
      std::printf("p=%d FAILED: %s\n", e.p, e.failure.c_str());
      continue;
    }
    std::printf("p=%d K sites=%ld Sigma:", e.p, static_cast<long>(e.k_sites));
    for (const auto& iv : e.sigma.intervals) std::printf(" [%.6g, %.6g]", iv.lower, iv.upper);
    std::printf(" gaps:");
    for (const auto& g : find_gaps(e.sigma)) std::printf(" (%.6g, %.6g)", g.lower, g.upper);
    std::printf("\n");
  }
  return r.passed() ? 0 : 1;
}

int cmd_localization(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  if (c.dry_run) return dry_run(cfg);
  const RunReport r = analyse_stored(cfg);
  const std::filesystem::path dir(cfg.output);
  write_localization_csv((dir / "localization.csv").string(), r);
  write_gap_csv((dir / "gap_states.csv").string(), r);
  for (const auto& e : r.entries) {
    if (!e.failure.empty()) {
      std::printf("p=%d FAILED: %s\n", e.p, e.failure.c_str());
      continue;
    }
    const auto k = median_kappa(e);
    std::printf("p=%d pairs=%ld median|kappa|=%s\n", e.p, static_cast<long>(e.gap ? e.gap->size() : 0),
                k ? std::to_string(*k).c_str() : "n/a");
  }
  return print_assertions(r);
}

int cmd_gauge(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  if (c.dry_run) return dry_run(cfg);
  std::vector<GaugeCheck> checks;
  bool ok = true;
  for (int p : cfg.p) {
    const GaugeCheck g = gauge_check(cfg, p, entry_seed(cfg.seed, p) ^ 0x6a09e667f3bcc909ULL);
    const bool pass = g.spectrum_rel <= 1e-10 && g.holonomy_change <= 1e-10 && g.hermiticity <= 1e-12;
    ok = ok && pass;
    std::printf("[%s] p=%d sites=%ld %s eigenvalues=%ld rel_change=%.3g holonomy_change=%.3g "
                "holonomy_vs_flux=%.3g hermiticity=%.3g\n",
                pass ? "PASS" : "FAIL", p, static_cast<long>(g.sites), g.dense ? "dense" : "sparse",
                static_cast<long>(g.compared), g.spectrum_rel, g.holonomy_change, g.holonomy_flux, g.hermiticity);
    checks.push_back(g);
  }
  std::filesystem::create_directories(cfg.output);
  write_gauge_json((std::filesystem::path(cfg.output) / "gauge_check.json").string(), cfg, checks);
  return ok ? 0 : 1;
}

int cmd_convergence(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  if (c.dry_run) return dry_run(cfg);
  RunStages st = RunStages::none();
  st.spectrum = true;
  const RunReport r = run_experiment(cfg, st);
  write_convergence_csv((std::filesystem::path(cfg.output) / "convergence.csv").string(), r);
  print_entries(r);
  return print_assertions(r);
}

int cmd_run(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  if (c.dry_run) return dry_run(cfg);
  const RunStages st;
  const RunReport r = run_experiment(cfg, st);
  write_report(r, st);
  print_entries(r);
  return print_assertions(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical magnetic Schrodinger spectra on 2D lattices"};
  app.require_subcommand(1);
  std::vector<std::pair<CLI::App*, int (*)(const Common&)>> commands;
  Common common;
  auto add = [&](const char* name, const char* help, int (*fn)(const Common&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    commands.emplace_back(sub, fn);
  };
  add("spectrum", "assemble and solve; spectrum.csv and gap_states.csv", cmd_spectrum);
  add("model-sigma", "local Landau levels, gaps and K only; sigma.json", cmd_sigma);
  add("localization", "analyse stored gap eigenvectors; localization.csv", cmd_localization);
  add("gauge-check", "gauge invariance suite", cmd_gauge);
  add("convergence", "p-sweep clustering table; convergence.csv", cmd_convergence);
  add("run", "full preset run with all artifacts and summary.json", cmd_run);

  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(common);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
