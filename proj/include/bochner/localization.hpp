#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "bochner/eigensolver.hpp"
#include "bochner/lattice.hpp"
#include "bochner/magnetic.hpp"
#include "bochner/model_spectrum.hpp"
#include "bochner/operator.hpp"

namespace bochner {

struct ClusterReport {
  std::vector<double> distances;      // d(lambda_i, Sigma), per eigenvalue
  std::vector<BranchLabel> nearest;   // nearest unmerged branch per eigenvalue
  std::vector<Index> interval_counts; // eigenvalues inside each merged interval
  Index outside = 0;                  // eigenvalues in no interval
  double max_distance = 0.0;
  double mean_distance = 0.0;
  bool truncated = false;  // some eigenvalue above the cutoff: distances are lower bounds
  int p = 0;
  double h = 0.0;
};

ClusterReport cluster_assign(const SpectrumSlice& slice, const SigmaUnion& sigma);

/// Per-site |u|^2 summed over the fibre components.
VectorXd site_density(const VectorXcd& u, Index sites);

/// W(c) = sum e^{2 c sqrt(p) d} |u|^2 dA / sum |u|^2 dA, accumulated in the
/// log domain.
double weighted_mass(const VectorXcd& u, const DistanceField& d, double c, double p);

/// Slope of log(shell RMS |u|) against distance over shells of width
/// `shell_width`, keeping shells whose RMS exceeds `floor`. Shells beyond
/// `max_distance` are ignored.
double decay_fit(const VectorXcd& u, const DistanceField& d, double shell_width,
                 double floor = 1e-12,
                 double max_distance = std::numeric_limits<double>::infinity());

struct NormBoundTrial {
  double ratio = 0.0;      // ||(H - lambda) u|| / ||u||
  double distance = 0.0;   // d(lambda, Sigma_Omega)
  double bound_gap = 0.0;  // (distance - ratio) p^{1/4}
};

NormBoundTrial norm_lower_bound_trial(const SparseHermitian& h, const SiteMask& omega,
                                      const SigmaUnion& sigma_omega, double lambda,
                                      const VectorXcd& u);

/// Least-squares slope of log(value) against log(p).
double scaling_exponent(const std::vector<std::pair<double, double>>& points);

struct BoundaryPartition {
  SpectrumSlice kept;
  SpectrumSlice artifacts;
  std::vector<double> kept_fraction;      // boundary-layer mass per kept pair
  std::vector<double> artifact_fraction;  // per artifact pair
  double layer = 0.0;                     // layer width 3 / sqrt(p b_max)
};

/// Mass fraction of u within `layer` of the truncation boundary.
double boundary_fraction(const Lattice& lattice, const VectorXcd& u, double layer);

BoundaryPartition boundary_filter(const SpectrumSlice& slice, const Lattice& lattice, double p,
                                  double b_max);

struct LocalizationEntry {
  std::vector<double> c_grid;
  std::vector<double> weighted;  // W(c) on the grid
  double c_star = 0.0;           // largest grid c with W <= cap
  double w_at_cmin = 0.0;
  std::optional<double> kappa;   // decay slope; empty when the fit lacks data
  double boundary_fraction = 0.0;
  double far_fraction = 0.0;     // mass where d(x, K) > 3 / sqrt(p b)
  bool artifact = false;
};

struct LocalizationSettings {
  double c_min = 0.2;
  double c_cap = 10.0;
  double c_max = 3.0;
  int c_steps = 31;
  double floor = 1e-12;
};

LocalizationEntry localize(const Lattice& lattice, const EigenPair& pair, const DistanceField& d,
                           double p, double b_min, double b_max,
                           const LocalizationSettings& settings = {});

/// Band-limited complex noise: Gaussian low-pass at `bandwidth` (1/length),
/// restricted to omega and mollified to zero within `taper` of its complement.
VectorXcd band_limited_trial(const Lattice& lattice, const SiteMask& omega, double bandwidth,
                             double taper, std::uint64_t seed);

/// Lowest-Landau-level coherent state e^{-p b |x - x0|^2 / 4} centred at
/// site x0 for a constant field b, carrying the phase that matches `gauge`.
/// Normalized; fibre component 0 only.
VectorXcd coherent_state(const Lattice& lattice, Index center, double p, double b, Gauge gauge,
                         int rank = 1);

}  // namespace bochner
