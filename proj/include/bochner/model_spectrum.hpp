#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bochner/lattice.hpp"
#include "bochner/magnetic.hpp"
#include "bochner/types.hpp"

namespace bochner {

/// The n positive numbers a_j with spectrum {+- i a_j} of a real skew matrix
/// (2n x 2n), ascending and repeated with multiplicity.
VectorXd skew_invariants(const MatrixXd& skew);

/// One local Landau level Lambda_{k,mu} = sum_j (2 k_j + 1) a_j + V_mu.
struct LandauLevel {
  double lambda = 0.0;
  std::vector<int> k;
  int mu = 0;
};

struct LandauSet {
  std::vector<LandauLevel> levels;  // ascending in lambda
  double cutoff = 0.0;
};

LandauSet landau_levels(const VectorXd& a, const VectorXd& v, double cutoff);

struct BranchLabel {
  int k = 0;  // 2D: single Landau index
  int mu = 0;
};

struct SigmaInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<BranchLabel> branches;
};

/// Closed-interval representation of the union of local Landau levels over a
/// region, truncated at `cutoff`. `branches` keeps the unmerged per-branch
/// (per connected component) ranges; `intervals` is their merged union.
struct SigmaUnion {
  std::vector<SigmaInterval> intervals;
  std::vector<SigmaInterval> branches;
  double cutoff = 0.0;
  std::string region;

  bool empty() const { return intervals.empty(); }
};

SigmaUnion sigma_region(const Lattice& lattice, const ScalarField& b, const PotentialField& v,
                        const SiteMask& region, double cutoff);

/// Merges arbitrary closed intervals into a SigmaUnion (labels carried along).
SigmaUnion merge_intervals(std::vector<SigmaInterval> pieces, double cutoff);

/// Default cutoff: window top plus twice the largest sum_j a_j over the region.
double default_cutoff(double window_top, const ScalarField& b, const SiteMask& region);

struct InterfaceSet {
  SiteMask mask;        // K_[a,b]
  SiteMask complement;  // Omega_[a,b]
  double window_lo = 0.0;
  double window_hi = 0.0;
  DistanceField distance;  // to K; empty when K is empty
  bool empty() const { return !mask.any(); }
};

InterfaceSet interface_set(const Lattice& lattice, const ScalarField& b, const PotentialField& v,
                           double window_lo, double window_hi, double cutoff);

double dist_to_sigma(double lambda, const SigmaUnion& sigma);

/// True when `lambda` lies above the cutoff, i.e. dist_to_sigma is only a lower bound.
bool beyond_cutoff(double lambda, const SigmaUnion& sigma);

/// Nearest unmerged branch to lambda.
BranchLabel nearest_branch(double lambda, const SigmaUnion& sigma);

struct OpenInterval {
  double lower = 0.0;
  double upper = 0.0;
};

std::vector<OpenInterval> find_gaps(const SigmaUnion& sigma);

/// Sites within `radius` of the complement Omega: the region whose Landau
/// levels bound ||(H - lambda) u|| for u supported in Omega.
SiteMask omega_neighbourhood(const Lattice& lattice, const SiteMask& omega, double radius);

/// Run-length encoding of a mask, one vector of (start, length) runs per row.
std::vector<std::vector<std::pair<int, int>>> run_length_rows(const Lattice& lattice,
                                                              const SiteMask& mask);

}  // namespace bochner
