#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bochner/error.hpp"
#include "bochner/run.hpp"

namespace bochner {

namespace {

using nlohmann::json;

// Shortest round-trip text, so reruns compare byte for byte.
std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  return out;
}

std::string provenance(const RunReport& r, const EntryResult& e) {
  return to_string(r.config.experiment) + "," + std::to_string(e.p) + "," + num(e.h) + "," + std::to_string(e.seed);
}

json branch_json(const BranchLabel& b) { return json{{"k", b.k}, {"mu", b.mu}}; }

json sigma_json(const SigmaUnion& s) {
  json intervals = json::array();
  for (const auto& iv : s.intervals) {
    json branches = json::array();
    for (const auto& b : iv.branches) branches.push_back(branch_json(b));
    intervals.push_back({{"lower", iv.lower}, {"upper", iv.upper}, {"branches", branches}});
  }
  json gaps = json::array();
  for (const auto& g : find_gaps(s)) gaps.push_back({{"lower", g.lower}, {"upper", jnum(g.upper)}});
  return {{"cutoff", s.cutoff}, {"intervals", intervals}, {"gaps", gaps}};
}

}  // namespace

std::string gap_vectors_path(const std::string& dir, int p) {
  return (std::filesystem::path(dir) / ("gap_states_p" + std::to_string(p) + ".bsev")).string();
}

void write_spectrum_csv(const std::string& path, const RunReport& report) {
  auto out = open_out(path);
  out << "experiment,p,h,seed,index,lambda,residual,dist_to_sigma,branch_k,branch_mu\n";
  for (const auto& e : report.entries) {
    for (std::size_t i = 0; i < e.spectrum.pairs.size(); ++i) {
      const EigenPair& pr = e.spectrum.pairs[i];
      out << provenance(report, e) << "," << i << "," << num(pr.lambda) << "," << num(pr.residual) << ","
          << num(e.spectrum_dist[i]) << "," << e.spectrum_branch[i].k << "," << e.spectrum_branch[i].mu << "\n";
    }
  }
}

void write_gap_csv(const std::string& path, const RunReport& report) {
  auto out = open_out(path);
  out << "experiment,p,h,seed,index,lambda,residual,dist_to_sigma,branch_k,branch_mu,boundary_fraction,"
         "artifact_flag\n";
  for (const auto& e : report.entries) {
    if (!e.gap) continue;
    for (std::size_t i = 0; i < e.gap->pairs.size(); ++i) {
      const EigenPair& pr = e.gap->pairs[i];
      out << provenance(report, e) << "," << i << "," << num(pr.lambda) << "," << num(pr.residual) << ","
          << num(e.gap_dist[i]) << "," << e.gap_branch[i].k << "," << e.gap_branch[i].mu << ","
          << num(e.gap_boundary[i]) << "," << (e.gap_artifact[i] ? 1 : 0) << "\n";
    }
  }
}

void write_localization_csv(const std::string& path, const RunReport& report) {
  auto out = open_out(path);
  out << "experiment,p,h,seed,index,c_star,kappa,W_at_cmin\n";
  for (const auto& e : report.entries) {
    for (std::size_t i = 0; i < e.localization.size(); ++i) {
      const LocalizationEntry& l = e.localization[i];
      out << provenance(report, e) << "," << i << "," << num(l.c_star) << ","
          << (l.kappa ? num(*l.kappa) : std::string()) << "," << num(l.w_at_cmin) << "\n";
    }
  }
}

void write_convergence_csv(const std::string& path, const RunReport& report) {
  auto out = open_out(path);
  out << "experiment,p,h,seed,pairs,max_dist,mean_dist,max_dist_all,truncated\n";
  for (const auto& e : report.entries) {
    out << provenance(report, e) << "," << e.spectrum.size() << "," << num(e.max_dist) << "," << num(e.mean_dist)
        << "," << num(e.max_dist_all) << "," << (e.truncated ? 1 : 0) << "\n";
  }
}

void write_sigma_json(const std::string& path, const RunReport& report) {
  const ExperimentConfig& cfg = report.config;
  json entries = json::array();
  for (const EntryResult& e : report.entries) {
    json rows = json::array();
    for (const auto& row : e.k_runs) {
      json runs = json::array();
      for (const auto& [start, len] : row) runs.push_back({start, len});
      rows.push_back(runs);
    }
    json entry = sigma_json(e.sigma);
    entry["p"] = e.p;
    entry["h"] = e.h;
    entry["seed"] = e.seed;
    entry["K"] = {{"window", {cfg.window_low(), cfg.window_high()}},
                  {"cols", e.cols},
                  {"rows", e.rows},
                  {"sites", e.k_sites},
                  {"runs", rows}};
    entries.push_back(entry);
  }
  auto out = open_out(path);
  out << json{{"experiment", to_string(cfg.experiment)}, {"entries", entries}}.dump(2) << "\n";
}

void write_summary_json(const std::string& path, const RunReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json j{{"p", e.p},
           {"h", e.h},
           {"seed", e.seed},
           {"nx", e.nx},
           {"sites", e.sites},
           {"b_min", e.b_min},
           {"b_max", e.b_max},
           {"cutoff", e.cutoff},
           {"failure", e.failure},
           {"spectrum_pairs", e.spectrum.size()},
           {"spectrum_certified", e.spectrum.certificate == Certificate::certified},
           {"max_dist", e.max_dist},
           {"mean_dist", e.mean_dist},
           {"max_dist_including_artifacts", e.max_dist_all},
           {"truncated", e.truncated}};
    if (e.cluster_count) j["cluster_count"] = *e.cluster_count;
    if (e.cluster_mean) j["cluster_mean"] = *e.cluster_mean;
    if (e.cluster_level) j["cluster_level"] = *e.cluster_level;
    if (e.gap) {
      Index kept = 0;
      for (const auto& l : e.localization) kept += l.artifact ? 0 : 1;
      j["gap_pairs"] = e.gap->size();
      j["gap_certified"] = e.gap->certificate == Certificate::certified;
      j["gap_non_artifact"] = kept;
      j["c_min"] = e.c_min;
      if (const auto k = median_kappa(e)) j["median_abs_kappa"] = *k;
    }
    if (!e.trial_bound_gap.empty()) {
      j["trials"] = e.trial_bound_gap.size();
      j["trial_distance"] = e.trial_distance;
      j["trial_max_bound_gap"] = *std::max_element(e.trial_bound_gap.begin(), e.trial_bound_gap.end());
      j["trial_min_ratio"] = *std::min_element(e.trial_ratio.begin(), e.trial_ratio.end());
    }
    entries.push_back(j);
  }
  json assertions = json::array();
  for (const auto& a : report.assertions) {
    assertions.push_back({{"name", a.name},
                          {"passed", a.passed},
                          {"measured", a.measured},
                          {"value", jnum(a.value)},
                          {"limit", jnum(a.limit)},
                          {"note", a.note}});
  }
  json root{{"experiment", to_string(report.config.experiment)},
            {"passed", report.passed()},
            {"seed", report.config.seed},
            {"config", echo_config(report.config)},
            {"entries", entries},
            {"assertions", assertions}};
  root["clustering_exponent"] = report.clustering_exponent ? jnum(*report.clustering_exponent) : json(nullptr);
  root["kappa_ratio"] = report.kappa_ratio ? jnum(*report.kappa_ratio) : json(nullptr);
  auto out = open_out(path);
  out << root.dump(2) << "\n";
}

void write_report(const RunReport& report, const RunStages& stages) {
  const std::filesystem::path dir(report.config.output);
  std::filesystem::create_directories(dir);
  if (stages.spectrum) write_spectrum_csv((dir / "spectrum.csv").string(), report);
  if (stages.gap) {
    write_gap_csv((dir / "gap_states.csv").string(), report);
    for (const auto& e : report.entries) {
      if (e.gap) write_eigenvectors(gap_vectors_path(dir.string(), e.p), *e.gap);
    }
  }
  if (stages.localization) write_localization_csv((dir / "localization.csv").string(), report);
  if (stages.sigma) write_sigma_json((dir / "sigma.json").string(), report);
  write_summary_json((dir / "summary.json").string(), report);
}

}  // namespace bochner
