#include <cmath>
#include <numbers>
#include <fstream>
#include <random>

#include <json.hpp>

#include "bochner/error.hpp"
#include "bochner/run.hpp"

namespace bochner {

namespace {

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

GaugeCheck gauge_check(const ExperimentConfig& cfg, int p, std::uint64_t seed) {
  const Instance in = build_instance(cfg, p);
  GaugeCheck out;
  out.p = p;
  out.sites = in.lattice.sites();
  out.hermiticity = hermiticity_defect(in.h);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  VectorXcd phases(in.lattice.sites());
  for (Index s = 0; s < phases.size(); ++s) phases(s) = std::polar(1.0, angle(rng));
  const GaugeLinks moved = apply_gauge_transform(in.links, in.lattice, phases);
  const SparseHermitian h2 = assemble_H(in.lattice, moved, in.v, p);

  const VectorXd hol = plaquette_holonomy(in.links, in.lattice);
  const VectorXd hol2 = plaquette_holonomy(moved, in.lattice);
  const double area = in.lattice.cell_area();
  for (Index k = 0; k < hol.size(); ++k) {
    out.holonomy_change = std::max(out.holonomy_change, std::abs(wrap(hol(k) - hol2(k))));
    out.holonomy_flux =
        std::max(out.holonomy_flux, std::abs(wrap(hol(k) + p * in.b.plaquette_values(k) * area)));
  }

  VectorXd e1;
  VectorXd e2;
  if (in.h.dim() <= 4096) {
    out.dense = true;
    e1 = dense_eigenvalues(in.h);
    e2 = dense_eigenvalues(h2);
  } else {
    const Index m = std::min<Index>(20, in.h.dim() - 1);
    const SolverOptions opts = solver_options(cfg, in.seed);
    e1 = lowest_eigs(in.h, m, 0.0, opts).eigenvalues();
    e2 = lowest_eigs(h2, m, 0.0, opts).eigenvalues();
  }
  out.compared = e1.size();
  const double scale = std::max(1.0, e1.cwiseAbs().maxCoeff());
  out.spectrum_rel = (e1 - e2).cwiseAbs().maxCoeff() / scale;
  return out;
}

void write_gauge_json(const std::string& path, const ExperimentConfig& cfg, const std::vector<GaugeCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"p", c.p},
                   {"sites", c.sites},
                   {"dense_oracle", c.dense},
                   {"eigenvalues_compared", c.compared},
                   {"spectrum_relative_change", c.spectrum_rel},
                   {"holonomy_change", c.holonomy_change},
                   {"holonomy_vs_flux", c.holonomy_flux},
                   {"hermiticity_defect", c.hermiticity}});
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out << nlohmann::json{{"experiment", to_string(cfg.experiment)}, {"checks", arr}}.dump(2) << "\n";
}

}  // namespace bochner
