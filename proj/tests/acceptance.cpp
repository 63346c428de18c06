// End-to-end acceptance run. One PASS/FAIL line per criterion; artifacts of the
// preset runs land in ./acceptance_out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "bochner/experiment.hpp"
#include "bochner/run.hpp"

using namespace bochner;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string out_dir(const std::string& name) { return "acceptance_out/" + name; }

ExperimentConfig preset(const char* text, const std::string& name) {
  ExperimentConfig cfg = parse_config(text);
  cfg.output = out_dir(name);
  return cfg;
}

const Assertion* find(const RunReport& r, const std::string& name) {
  for (const auto& a : r.assertions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool all_named(const RunReport& r, const std::string& prefix, std::ostringstream& os) {
  bool ok = true;
  bool any = false;
  for (const auto& a : r.assertions) {
    if (a.name.rfind(prefix, 0) != 0) continue;
    any = true;
    ok = ok && a.passed;
    os << " " << a.name << "=" << (a.passed ? "ok" : "FAIL") << "(" << a.measured << ")";
  }
  return ok && any;
}

std::string failures(const RunReport& r) {
  std::string s;
  for (const auto& e : r.entries) {
    if (!e.failure.empty()) s += " p=" + std::to_string(e.p) + " failed: " + e.failure;
  }
  return s;
}

VectorXd oracle(const SparseHermitian& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(h.matrix), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Outcome gauge_invariance() {
  ExperimentConfig cfg = preset("experiment = a\np = [4]\n[lattice]\nnx = 24\n", "gauge");
  const Instance in = build_instance(cfg, 4);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  VectorXcd phi(in.lattice.sites());
  for (Index s = 0; s < phi.size(); ++s) phi(s) = std::polar(1.0, angle(rng));
  const SparseHermitian moved = assemble_H(in.lattice, apply_gauge_transform(in.links, in.lattice, phi), in.v, 4);
  const VectorXd a = dense_eigenvalues(in.h);
  const VectorXd b = dense_eigenvalues(moved);
  double rel = 0.0;
  for (Index i = 0; i < a.size(); ++i) rel = std::max(rel, std::abs(a(i) - b(i)) / std::abs(a(i)));
  const GaugeCheck g = gauge_check(cfg, 4, 99);
  std::ostringstream os;
  os << "24x24 torus p=4, " << a.size() << " eigenvalues, max relative change " << rel
     << ", holonomy change " << g.holonomy_change;
  return {rel <= 1e-10 && g.holonomy_change <= 1e-12 && in.lattice.sites() == 576, os.str()};
}

// The preset's field and potential on its planned domain, sampled with n points
// per side regardless of the resolution rule.
SparseHermitian reduced_operator(const ExperimentConfig& cfg, int p, int n) {
  LatticeSpec spec = plan_lattice(cfg, p);
  spec.nx = n;
  spec.ny = n;
  const Lattice lat = build_lattice(spec);
  const GaugeLinks links = gauge_links(edge_integrals(cfg.field, lat, default_gauge(cfg.field, lat)), p);
  return assemble_H(lat, links, sample_potential(cfg.potential, lat), p);
}

Outcome oracle_equivalence() {
  struct Case {
    const char* text;
    int p;
    int n;
  };
  const Case cases[] = {{"experiment = a\np = [4]\n", 4, 32},
                        {"experiment = b\np = [8]\n", 8, 32},
                        {"experiment = c\np = [16]\n", 16, 32}};
  bool ok = true;
  std::ostringstream os;
  for (const Case& c : cases) {
    const ExperimentConfig cfg = parse_config(c.text);
    const SparseHermitian h = reduced_operator(cfg, c.p, c.n);
    const VectorXd ref = oracle(h);
    const SpectrumSlice s = lowest_eigs(h, 20);
    double err = 0.0;
    for (Index i = 0; i < 20; ++i) err = std::max(err, std::abs(s.pairs[i].lambda - ref(i)));
    ok = ok && h.dim() <= 1024 && s.size() == 20 && err <= 1e-8;
    os << to_string(cfg.experiment) << " N=" << h.dim() << " err=" << err << "; ";
  }
  return {ok, os.str()};
}

Outcome landau_clusters() {
  ExperimentConfig cfg = preset("experiment = a\np = [4, 8, 16]\nresolution = high_accuracy\n", "torus_constant");
  RunStages st = RunStages::none();
  st.spectrum = true;
  st.write = true;
  const RunReport r = run_experiment(cfg, st);
  write_report(r, st);
  std::ostringstream os;
  bool ok = r.passed();
  ok = all_named(r, "cluster_count", os) && ok;
  ok = all_named(r, "cluster_mean", os) && ok;
  // dense oracle at p = 4
  const Instance in = build_instance(cfg, 4);
  const VectorXd ev = dense_eigenvalues(in.h);
  const double b = cfg.field.b;
  Index count = 0;
  double sum = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - b) <= 0.2 * 2 * b) {
      ++count;
      sum += ev(i);
    }
  }
  const double rel = count ? std::abs(sum / count - b) / b : 1.0;
  ok = ok && count == 4 && rel <= 0.05;
  os << " dense p=4: " << count << " in cluster, mean offset " << rel << failures(r);
  return {ok, os.str()};
}

Outcome clustering_rate() {
  ExperimentConfig cfg = preset("experiment = b\n", "plane_radial_dip");
  RunStages st = RunStages::none();
  st.spectrum = true;
  st.write = true;
  const RunReport r = run_experiment(cfg, st);
  write_report(r, st);
  write_convergence_csv(cfg.output + "/convergence.csv", r);
  const Assertion* a = find(r, "clustering_exponent");
  std::ostringstream os;
  if (a) os << a->measured << (a->note.empty() ? "" : " (" + a->note + ")");
  for (const auto& e : r.entries) os << " | p=" << e.p << " pairs=" << e.spectrum.size() << " unfiltered max d=" << e.max_dist_all;
  os << failures(r);
  return {a && a->passed && r.passed(), os.str()};
}

RunReport edge_run;

Outcome edge_states() {
  ExperimentConfig cfg = preset("experiment = c\n", "plane_potential_bump");
  RunStages st;
  st.trials = false;
  edge_run = run_experiment(cfg, st);
  write_report(edge_run, st);
  std::ostringstream os;
  bool ok = find(edge_run, "solver_converged") && find(edge_run, "solver_converged")->passed;
  ok = all_named(edge_run, "gap_pairs", os) && ok;
  ok = all_named(edge_run, "gap_far_mass", os) && ok;
  ok = all_named(edge_run, "weighted_mass", os) && ok;
  for (const auto& e : edge_run.entries) {
    ok = ok && find(edge_run, "gap_pairs_p" + std::to_string(e.p)) != nullptr;
  }
  os << failures(edge_run);
  return {ok, os.str()};
}

Outcome decay_law() {
  const Assertion* a = find(edge_run, "decay_rate_law");
  std::ostringstream os;
  if (!a) return {false, "no kappa fits available"};
  for (const auto& e : edge_run.entries) {
    if (const auto k = median_kappa(e)) os << "p=" << e.p << " median|kappa|=" << *k << "; ";
  }
  const double ratio = a->value;
  os << a->measured;
  return {a->passed && ratio >= 1.5 && ratio <= 2.5, os.str()};
}

Outcome norm_bound() {
  ExperimentConfig cfg = preset("experiment = c\np = [8, 16, 32]\n", "trials");
  RunStages st = RunStages::none();
  st.trials = true;
  const RunReport r = run_experiment(cfg, st);
  std::ostringstream os;
  const Assertion* a = find(r, "norm_lower_bound");
  bool ok = a && a->passed && r.passed();
  for (const auto& e : r.entries) {
    ok = ok && e.trial_bound_gap.size() == 100;
    if (e.trial_bound_gap.empty()) continue;
    os << "p=" << e.p << " d=" << e.trial_distance
       << " max bound_gap=" << *std::max_element(e.trial_bound_gap.begin(), e.trial_bound_gap.end()) << "; ";
  }
  os << failures(r);
  return {ok, os.str()};
}

Outcome conjugation() {
  ExperimentConfig cfg = parse_config("experiment = c\np = [16]\n");
  const Instance in = build_instance(cfg, 16);
  const WeightField w = smooth_distance(in.lattice, in.interface.distance, 16);
  const TaylorTerms t = taylor_terms(in.h, w, 16);
  auto remainder = [&](double tau) {
    const SparseMatrix approx = in.h.matrix + (tau / 4.0) * t.first.matrix + (tau * tau) * t.second.matrix;
    const SparseMatrix diff = conjugate_H(in.h, w, tau, 16).matrix - approx;
    double m = 0.0;
    for (Index k = 0; k < diff.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
  };
  const double ratio = remainder(1e-2) / remainder(5e-3);
  const SparseHermitian zero = conjugate_H(in.h, w, 0.0, 16);
  bool exact = zero.matrix.nonZeros() == in.h.matrix.nonZeros();
  for (Index k = 0; exact && k < zero.matrix.nonZeros(); ++k) {
    exact = zero.matrix.valuePtr()[k] == in.h.matrix.valuePtr()[k] &&
            zero.matrix.innerIndexPtr()[k] == in.h.matrix.innerIndexPtr()[k];
  }
  std::ostringstream os;
  os << "R(1e-2)/R(5e-3) = " << ratio << ", tau = 0 bit-exact: " << (exact ? "yes" : "no");
  return {ratio >= 6.0 && ratio <= 10.0 && exact, os.str()};
}

Outcome model_suite() {
  bool ok = true;
  std::ostringstream os;
  // Landau levels against a brute-force box enumeration.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ua(0.2, 2.0), uv(-1.0, 1.0), uc(0.0, 12.0);
  std::uniform_int_distribution<int> un(1, 3);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    VectorXd a(un(rng)), v(un(rng));
    for (Index j = 0; j < a.size(); ++j) a(j) = ua(rng);
    for (Index j = 0; j < v.size(); ++j) v(j) = uv(rng);
    const double cutoff = uc(rng);
    std::vector<double> ref;
    const int kmax = static_cast<int>(cutoff / (2 * a.minCoeff())) + 2;
    std::vector<int> k(a.size(), 0);
    for (Index mu = 0; mu < v.size(); ++mu) {
      std::fill(k.begin(), k.end(), 0);
      while (true) {
        double l = v(mu);
        for (Index j = 0; j < a.size(); ++j) l += (2.0 * k[j] + 1.0) * a(j);
        if (l <= cutoff) ref.push_back(l);
        Index j = 0;
        while (j < a.size() && ++k[j] > kmax) k[j++] = 0;
        if (j == a.size()) break;
      }
    }
    std::sort(ref.begin(), ref.end());
    const LandauSet got = landau_levels(a, v, cutoff);
    bool same = got.levels.size() == ref.size();
    for (std::size_t i = 0; same && i < ref.size(); ++i) same = std::abs(got.levels[i].lambda - ref[i]) < 1e-12;
    mismatches += same ? 0 : 1;
  }
  ok = ok && mismatches == 0;
  os << "landau brute force mismatches " << mismatches << "/1000; ";

  // Preset B interface set is the disk of radius sqrt(ln 1.5).
  ExperimentConfig cfg = parse_config("experiment = b\np = [16]\n");
  const Instance in = build_instance(cfg, 16);
  double rmax = 0.0;
  int misplaced = 0;
  const double radius = std::sqrt(std::log(1.5));
  const double cell = std::hypot(in.lattice.hx(), in.lattice.hy());
  for (Index s = 0; s < in.lattice.sites(); ++s) {
    const double rho = in.lattice.position(s).norm();
    if (in.interface.mask(s)) rmax = std::max(rmax, rho);
    if (in.interface.mask(s) != (rho <= radius) && std::abs(rho - radius) > cell) ++misplaced;
  }
  ok = ok && misplaced == 0 && std::abs(rmax - radius) <= cell;
  os << "disk radius " << rmax << " vs " << radius << " (cell " << cell << "); ";

  // Gaps and distances on random unions, checked point by point.
  int bad = 0;
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 300; ++t) {
    std::vector<SigmaInterval> raw;
    for (int i = 0; i < 4; ++i) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      raw.push_back({a, b, {{i, 0}}});
    }
    const SigmaUnion m = merge_intervals(raw, 10.0);
    const auto gaps = find_gaps(m);
    for (double x = -1.0; x <= 11.0; x += 0.01) {
      double ref = 1e300;
      for (const auto& p : raw) ref = std::min(ref, x < p.lower ? p.lower - x : (x > p.upper ? x - p.upper : 0.0));
      if (std::abs(dist_to_sigma(x, m) - ref) > 1e-12) ++bad;
      bool in_gap = false;
      for (const auto& g : gaps) in_gap = in_gap || (x > g.lower && x < g.upper);
      if (in_gap != (ref > 0.0 && x > m.intervals.front().upper && x < m.intervals.back().lower)) ++bad;
    }
  }
  ok = ok && bad == 0;
  os << "gap/distance mismatches " << bad;
  return {ok, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1 gauge invariance", gauge_invariance},
      {"2 oracle equivalence", oracle_equivalence},
      {"3 landau cluster counts", landau_clusters},
      {"4 clustering rate", clustering_rate},
      {"5 gap edge states localize", edge_states},
      {"6 sqrt(p) decay-rate law", decay_law},
      {"7 norm lower bound", norm_bound},
      {"8 conjugation identity", conjugation},
      {"9 model-spectrum suite", model_suite},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %s (%.1fs): %s\n", o.passed ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
