#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bochner/experiment.hpp"

namespace bochner {

/// Pipeline stages a subcommand asks for.
struct RunStages {
  bool spectrum = true;      // spectrum.csv range
  bool gap = true;           // window_eigs on the shrunk window
  bool localization = true;  // per gap pair diagnostics
  bool trials = true;        // norm lower bound statistics
  bool write = true;         // artifacts on disk
  bool sigma = true;         // sigma.json

  static RunStages none() { return {false, false, false, false, false, false}; }
};

/// Results at one tensor power.
struct EntryResult {
  int p = 0;
  double h = 0.0;
  std::uint64_t seed = 0;
  Index sites = 0;
  int nx = 0;
  double b_min = 0.0;
  double b_max = 0.0;
  double cutoff = 0.0;
  double seconds = 0.0;
  std::string failure;  // solver diagnostics; empty on success

  SigmaUnion sigma;
  int cols = 0;
  int rows = 0;
  Index k_sites = 0;
  std::vector<std::vector<std::pair<int, int>>> k_runs;  // K mask, per row

  SpectrumSlice spectrum;
  std::vector<double> spectrum_dist;
  std::vector<BranchLabel> spectrum_branch;
  std::vector<double> spectrum_boundary;
  std::vector<bool> spectrum_artifact;

  // Torus: counts by inertia around the lowest level.
  std::optional<Index> cluster_count;
  std::optional<double> cluster_mean;
  std::optional<double> cluster_level;

  // Clustering distance over non-artifact spectrum pairs.
  double max_dist = 0.0;
  double mean_dist = 0.0;
  double max_dist_all = 0.0;
  bool truncated = false;

  std::optional<SpectrumSlice> gap;
  std::vector<double> gap_dist;
  std::vector<BranchLabel> gap_branch;
  std::vector<double> gap_boundary;
  std::vector<bool> gap_artifact;
  std::vector<LocalizationEntry> localization;  // aligned with gap pairs
  double c_min = 0.0;

  std::vector<double> trial_bound_gap;
  std::vector<double> trial_ratio;
  double trial_distance = 0.0;
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string measured;  // human readable
  double value = 0.0;
  double limit = 0.0;
  std::string note;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<EntryResult> entries;
  std::vector<Assertion> assertions;
  std::optional<double> clustering_exponent;
  std::optional<double> kappa_ratio;

  bool passed() const;
};

/// Runs every p entry (independent; up to cfg.threads at once) and evaluates
/// the preset assertions. Never throws for per-entry solver failures; those
/// land in EntryResult::failure and fail the run.
RunReport run_experiment(const ExperimentConfig& cfg, const RunStages& stages = {});

EntryResult run_entry(const ExperimentConfig& cfg, int p, const RunStages& stages);

/// Re-analyses gap pairs stored as BSEV files from an earlier run.
RunReport analyse_stored(const ExperimentConfig& cfg);

std::vector<Assertion> evaluate_assertions(const ExperimentConfig& cfg, const std::vector<EntryResult>& entries,
                                           std::optional<double>& clustering_exponent,
                                           std::optional<double>& kappa_ratio);

/// Median |kappa| over non-artifact gap pairs; nullopt when none fitted.
std::optional<double> median_kappa(const EntryResult& e);

// Artifacts. All CSV rows start with experiment, p, h, seed.
void write_spectrum_csv(const std::string& path, const RunReport& report);
void write_gap_csv(const std::string& path, const RunReport& report);
void write_localization_csv(const std::string& path, const RunReport& report);
void write_sigma_json(const std::string& path, const RunReport& report);
void write_summary_json(const std::string& path, const RunReport& report);
void write_convergence_csv(const std::string& path, const RunReport& report);
std::string gap_vectors_path(const std::string& dir, int p);

/// Writes whatever the stages produced into cfg.output.
void write_report(const RunReport& report, const RunStages& stages);

/// Gauge invariance suite at one p.
struct GaugeCheck {
  int p = 0;
  Index sites = 0;
  bool dense = false;          // dense oracle used for the spectra
  Index compared = 0;          // eigenvalues compared
  double spectrum_rel = 0.0;   // max relative eigenvalue change under a random gauge
  double holonomy_change = 0.0;  // max plaquette holonomy change under the gauge
  double holonomy_flux = 0.0;  // max |holonomy + p * b(center) * area|, wrapped
  double hermiticity = 0.0;
};

GaugeCheck gauge_check(const ExperimentConfig& cfg, int p, std::uint64_t seed);
void write_gauge_json(const std::string& path, const ExperimentConfig& cfg, const std::vector<GaugeCheck>& checks);

/// Planned lattices per p, for dry runs.
std::string describe_plan(const ExperimentConfig& cfg);

}  // namespace bochner
