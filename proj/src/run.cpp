#include "bochner/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "bochner/error.hpp"

namespace bochner {

namespace {

double layer_width(double p, double b_max) { return 3.0 / std::sqrt(p * b_max); }

void annotate_spectrum(EntryResult& e, const Instance& in) {
  const double layer = layer_width(in.p, in.b_max);
  double total = 0.0;
  Index kept = 0;
  for (const EigenPair& pr : e.spectrum.pairs) {
    const double d = dist_to_sigma(pr.lambda, in.sigma);
    const double frac = in.lattice.is_torus() ? 0.0 : boundary_fraction(in.lattice, pr.vector, layer);
    const bool artifact = frac > 0.5;
    e.spectrum_dist.push_back(d);
    e.spectrum_branch.push_back(nearest_branch(pr.lambda, in.sigma));
    e.spectrum_boundary.push_back(frac);
    e.spectrum_artifact.push_back(artifact);
    e.truncated = e.truncated || beyond_cutoff(pr.lambda, in.sigma);
    e.max_dist_all = std::max(e.max_dist_all, d);
    if (!artifact) {
      e.max_dist = std::max(e.max_dist, d);
      total += d;
      ++kept;
    }
  }
  e.mean_dist = kept > 0 ? total / static_cast<double>(kept) : 0.0;
}

void torus_cluster(EntryResult& e, const Instance& in) {
  // Lowest local level; exact for a constant field and constant potential.
  const double level = in.sigma.intervals.front().lower;
  const double spacing = 2.0 * in.b_min;
  const double lo = level - 0.2 * spacing;
  const double hi = level + 0.2 * spacing;
  e.cluster_level = level;
  e.cluster_count = inertia_count(in.h, hi) - inertia_count(in.h, lo);
  double sum = 0.0;
  Index n = 0;
  for (const EigenPair& pr : e.spectrum.pairs) {
    if (pr.lambda >= lo && pr.lambda <= hi) {
      sum += pr.lambda;
      ++n;
    }
  }
  if (n > 0) e.cluster_mean = sum / static_cast<double>(n);
}

SpectrumSlice solve_range(const ExperimentConfig& cfg, const Instance& in, const SolverOptions& opts) {
  switch (cfg.solver.spectrum) {
    case SpectrumRange::lowest: {
      Index m = cfg.solver.lowest_count;
      if (m <= 0) m = in.lattice.is_torus() ? static_cast<Index>(in.p) * cfg.c1 : 20;
      m = std::min<Index>(m, in.h.dim() - 1);
      return lowest_eigs(in.h, m, 0.0, opts);
    }
    case SpectrumRange::cutoff: {
      const double lower = std::min(0.0, gershgorin_bounds(in.h).lower - 1e-3);
      return window_eigs(in.h, lower, in.cutoff, 0.0, opts);
    }
    case SpectrumRange::window:
      return window_eigs(in.h, cfg.window_low() + cfg.solver.margin, cfg.window_high() - cfg.solver.margin, 0.0,
                         opts);
  }
  return {};
}

LocalizationSettings localization_settings(const ExperimentConfig& cfg, double b_min) {
  LocalizationSettings s;
  s.c_min = cfg.analysis.c_min > 0.0 ? cfg.analysis.c_min : 0.2 * std::sqrt(b_min);
  s.c_cap = cfg.analysis.c_cap;
  s.c_max = cfg.analysis.c_max;
  s.c_steps = cfg.analysis.c_steps;
  s.floor = cfg.analysis.decay_floor;
  return s;
}

void analyse_gap(EntryResult& e, const ExperimentConfig& cfg, const Instance& in, bool localization) {
  e.gap_dist.clear();
  e.gap_branch.clear();
  e.gap_boundary.clear();
  e.gap_artifact.clear();
  e.localization.clear();
  const double layer = layer_width(in.p, in.b_max);
  for (const EigenPair& pr : e.gap->pairs) {
    e.gap_dist.push_back(dist_to_sigma(pr.lambda, in.sigma));
    e.gap_branch.push_back(nearest_branch(pr.lambda, in.sigma));
    const double frac = in.lattice.is_torus() ? 0.0 : boundary_fraction(in.lattice, pr.vector, layer);
    e.gap_boundary.push_back(frac);
    e.gap_artifact.push_back(frac > 0.5);
  }
  const LocalizationSettings settings = localization_settings(cfg, in.b_min);
  e.c_min = settings.c_min;
  if (!localization || in.interface.empty()) return;
  for (const EigenPair& pr : e.gap->pairs) {
    e.localization.push_back(
        localize(in.lattice, pr, in.interface.distance, in.p, in.b_min, in.b_max, settings));
  }
}

void run_trials(EntryResult& e, const ExperimentConfig& cfg, const Instance& in) {
  const SiteMask& omega = in.interface.complement;
  if (!omega.any()) return;
  const SiteMask near = omega_neighbourhood(in.lattice, omega, std::pow(static_cast<double>(in.p), -0.25));
  const SigmaUnion sigma_omega = sigma_region(in.lattice, in.b, in.v, near, in.cutoff);
  const double lambda = 0.5 * (cfg.window_low() + cfg.window_high());
  e.trial_distance = dist_to_sigma(lambda, sigma_omega);
  const double taper = cfg.analysis.taper / std::sqrt(in.p * in.b_min);
  for (int t = 0; t < cfg.analysis.trials; ++t) {
    const VectorXcd u = band_limited_trial(in.lattice, omega, cfg.analysis.bandwidth, taper,
                                           in.seed + static_cast<std::uint64_t>(t) + 1);
    const NormBoundTrial r = norm_lower_bound_trial(in.h, omega, sigma_omega, lambda, u);
    e.trial_bound_gap.push_back(r.bound_gap);
    e.trial_ratio.push_back(r.ratio);
  }
}

void fill_meta(EntryResult& e, const Instance& in) {
  e.p = in.p;
  e.h = std::max(in.lattice.hx(), in.lattice.hy());
  e.seed = in.seed;
  e.sites = in.lattice.sites();
  e.nx = in.lattice.nx();
  e.b_min = in.b_min;
  e.b_max = in.b_max;
  e.cutoff = in.cutoff;
  e.sigma = in.sigma;
  e.cols = in.lattice.cols();
  e.rows = in.lattice.rows();
  e.k_sites = in.interface.mask.count();
  e.k_runs = run_length_rows(in.lattice, in.interface.mask);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

bool RunReport::passed() const {
  for (const auto& e : entries) {
    if (!e.failure.empty()) return false;
  }
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

EntryResult run_entry(const ExperimentConfig& cfg, int p, const RunStages& stages) {
  const auto start = std::chrono::steady_clock::now();
  EntryResult e;
  e.p = p;
  try {
    const Instance in = build_instance(cfg, p);
    fill_meta(e, in);
    const SolverOptions opts = solver_options(cfg, in.seed);
    if (stages.spectrum) {
      e.spectrum = solve_range(cfg, in, opts);
      annotate_spectrum(e, in);
      if (in.lattice.is_torus()) torus_cluster(e, in);
    }
    if (stages.gap) {
      if (stages.spectrum && cfg.solver.spectrum == SpectrumRange::window) {
        e.gap = e.spectrum;
      } else {
        e.gap = window_eigs(in.h, cfg.window_low() + cfg.solver.margin, cfg.window_high() - cfg.solver.margin,
                            0.0, opts);
      }
      analyse_gap(e, cfg, in, stages.localization);
    }
    if (stages.trials && cfg.analysis.trials > 0) run_trials(e, cfg, in);
  } catch (const ConvergenceError& err) {
    e.failure = err.what();
  } catch (const Error& err) {
    e.failure = err.what();
  }
  e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return e;
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunStages& stages) {
  validate_config(cfg);
  RunReport report;
  report.config = cfg;
  report.entries.resize(cfg.p.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.p.size(); i = next++) {
      report.entries[i] = run_entry(cfg, cfg.p[i], stages);
    }
  };
  const int workers = std::min<int>(cfg.threads, static_cast<int>(cfg.p.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  report.assertions =
      evaluate_assertions(cfg, report.entries, report.clustering_exponent, report.kappa_ratio);
  return report;
}

RunReport analyse_stored(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunReport report;
  report.config = cfg;
  for (int p : cfg.p) {
    EntryResult e;
    e.p = p;
    try {
      const Instance in = build_instance(cfg, p);
      fill_meta(e, in);
      e.gap = read_eigenvectors(gap_vectors_path(cfg.output, p));
      if (!e.gap->pairs.empty() && e.gap->pairs.front().vector.size() != in.h.dim()) {
        throw Error(ErrorCode::invalid_data, "stored eigenvectors do not match the lattice at p = " +
                                                 std::to_string(p));
      }
      analyse_gap(e, cfg, in, true);
    } catch (const Error& err) {
      e.failure = err.what();
    }
    report.entries.push_back(std::move(e));
  }
  report.assertions = evaluate_assertions(cfg, report.entries, report.clustering_exponent, report.kappa_ratio);
  return report;
}

std::optional<double> median_kappa(const EntryResult& e) {
  std::vector<double> k;
  for (std::size_t i = 0; i < e.localization.size(); ++i) {
    if (!e.localization[i].artifact && e.localization[i].kappa) k.push_back(std::abs(*e.localization[i].kappa));
  }
  if (k.empty()) return std::nullopt;
  std::sort(k.begin(), k.end());
  const std::size_t n = k.size();
  return n % 2 ? k[n / 2] : 0.5 * (k[n / 2 - 1] + k[n / 2]);
}

std::vector<Assertion> evaluate_assertions(const ExperimentConfig& cfg, const std::vector<EntryResult>& entries,
                                           std::optional<double>& clustering_exponent,
                                           std::optional<double>& kappa_ratio) {
  std::vector<Assertion> out;
  {
    Assertion a{"solver_converged", true, "all entries", 0.0, 0.0, ""};
    for (const auto& e : entries) {
      if (!e.failure.empty()) {
        a.passed = false;
        a.note += "p=" + std::to_string(e.p) + ": " + e.failure + "; ";
      }
    }
    out.push_back(a);
  }
  const bool have_spectrum = std::any_of(entries.begin(), entries.end(),
                                         [](const EntryResult& e) { return !e.spectrum.pairs.empty(); });

  if (cfg.experiment == ExperimentId::torus_constant && have_spectrum) {
    for (const auto& e : entries) {
      if (!e.failure.empty() || !e.cluster_count) continue;
      const std::string tag = "_p" + std::to_string(e.p);
      const Index expected = static_cast<Index>(e.p) * cfg.c1;
      out.push_back({"cluster_count" + tag, *e.cluster_count == expected,
                     std::to_string(*e.cluster_count) + " of " + std::to_string(expected),
                     static_cast<double>(*e.cluster_count), static_cast<double>(expected),
                     "eigenvalues within 0.2 level spacings of the lowest level"});
      const double rel = e.cluster_mean ? std::abs(*e.cluster_mean - *e.cluster_level) / *e.cluster_level : 1.0;
      out.push_back({"cluster_mean" + tag, rel <= 0.05, "relative offset " + fmt(rel), rel, 0.05, ""});
      const double spacing = 2.0 * e.b_min;
      out.push_back({"cluster_distance" + tag, e.max_dist <= 0.1 * spacing,
                     "max d(lambda, Sigma) " + fmt(e.max_dist), e.max_dist, 0.1 * spacing, ""});
    }
  }

  if (cfg.solver.spectrum == SpectrumRange::cutoff && have_spectrum && entries.size() >= 2) {
    Assertion a{"clustering_exponent", false, "", 0.0, -0.25, ""};
    std::vector<std::pair<double, double>> pts;
    int last_positive = -1;
    bool ok = true;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!entries[i].failure.empty()) ok = false;
      if (entries[i].max_dist > 0.0) last_positive = static_cast<int>(i);
    }
    std::ostringstream m;
    m << "max d per p:";
    for (const auto& e : entries) m << " " << e.p << ":" << fmt(e.max_dist);
    for (int i = 0; i <= last_positive; ++i) {
      if (!(entries[static_cast<std::size_t>(i)].max_dist > 0.0)) ok = false;
      pts.emplace_back(entries[static_cast<std::size_t>(i)].p, entries[static_cast<std::size_t>(i)].max_dist);
    }
    if (!ok) {
      a.note = "distance sequence unusable (solver failure or zero before a positive value)";
    } else if (last_positive < 0) {
      a.passed = true;
      a.value = -std::numeric_limits<double>::infinity();
      a.note = "every non-artifact eigenvalue lies in Sigma; max distance is 0 at every p";
    } else if (last_positive == 0) {
      a.passed = true;
      a.value = -std::numeric_limits<double>::infinity();
      a.note = "distance vanishes after the first p";
    } else {
      a.value = scaling_exponent(pts);
      clustering_exponent = a.value;
      a.passed = a.value <= -0.25;
      if (static_cast<std::size_t>(last_positive) + 1 < entries.size()) a.note = "fit stops where distance reaches 0";
    }
    m << "; exponent " << (last_positive >= 1 && ok ? fmt(a.value) : std::string("n/a"));
    a.measured = m.str();
    out.push_back(a);
  }

  if (cfg.experiment == ExperimentId::plane_potential_bump) {
    for (const auto& e : entries) {
      if (!e.gap || !e.failure.empty()) continue;
      const std::string tag = "_p" + std::to_string(e.p);
      Index kept = 0;
      double worst_far = 0.0;
      double worst_w = 0.0;
      for (std::size_t i = 0; i < e.localization.size(); ++i) {
        const LocalizationEntry& l = e.localization[i];
        if (l.artifact) continue;
        ++kept;
        worst_far = std::max(worst_far, l.far_fraction);
        worst_w = std::max(worst_w, l.w_at_cmin);
      }
      const bool certified = e.gap->certificate == Certificate::certified;
      out.push_back({"gap_pairs" + tag, certified && kept >= 1,
                     std::to_string(kept) + " non-artifact of " + std::to_string(e.gap->size()) +
                         (certified ? " (certified)" : " (heuristic)"),
                     static_cast<double>(kept), 1.0, ""});
      if (kept == 0) continue;
      out.push_back({"gap_far_mass" + tag, worst_far <= cfg.analysis.far_mass, "max far mass " + fmt(worst_far),
                     worst_far, cfg.analysis.far_mass, "mass where d(x, K) > 3 magnetic lengths"});
      out.push_back({"weighted_mass" + tag, worst_w <= cfg.analysis.c_cap,
                     "max W(c_min=" + fmt(e.c_min) + ") " + fmt(worst_w), worst_w, cfg.analysis.c_cap, ""});
    }
    const EntryResult* first = nullptr;
    const EntryResult* last = nullptr;
    for (const auto& e : entries) {
      if (!median_kappa(e)) continue;
      if (!first) first = &e;
      last = &e;
    }
    if (first && last && first != last) {
      const double ratio = *median_kappa(*last) / *median_kappa(*first);
      const double ideal = std::sqrt(static_cast<double>(last->p) / first->p);
      kappa_ratio = ratio;
      out.push_back({"decay_rate_law", ratio >= 0.75 * ideal && ratio <= 1.25 * ideal,
                     "|kappa_" + std::to_string(last->p) + "|/|kappa_" + std::to_string(first->p) + "| = " +
                         fmt(ratio) + " (ideal " + fmt(ideal) + ")",
                     ratio, 1.25 * ideal, "allowed band is ideal +- 25%"});
    }
    const EntryResult* t0 = nullptr;
    const EntryResult* t1 = nullptr;
    for (const auto& e : entries) {
      if (e.trial_bound_gap.empty()) continue;
      if (!t0) t0 = &e;
      t1 = &e;
    }
    if (t0 && t1 && t0 != t1) {
      const double m0 = *std::max_element(t0->trial_bound_gap.begin(), t0->trial_bound_gap.end());
      const double m1 = *std::max_element(t1->trial_bound_gap.begin(), t1->trial_bound_gap.end());
      out.push_back({"norm_lower_bound", m1 <= 1.5 * m0 + 0.1,
                     "max bound_gap p=" + std::to_string(t0->p) + ": " + fmt(m0) + ", p=" + std::to_string(t1->p) +
                         ": " + fmt(m1),
                     m1, 1.5 * m0 + 0.1, ""});
    }
  }
  return out;
}

std::string describe_plan(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (int p : cfg.p) {
    const LatticeSpec spec = plan_lattice(cfg, p);
    const Lattice lat(spec);
    const double h = std::max(lat.hx(), lat.hy());
    os << "p=" << p << " " << (lat.is_torus() ? "torus" : "rectangle") << " extent=" << fmt(spec.extent_x)
       << " nx=" << spec.nx << " sites=" << lat.sites() << " h=" << fmt(h)
       << " h*sqrt(p*b_max)=" << fmt(h * std::sqrt(p * cfg.field.supremum())) << "\n";
  }
  return os.str();
}

}  // namespace bochner
