#include "bochner/model_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bochner/error.hpp"

namespace bochner {

VectorXd skew_invariants(const MatrixXd& skew) {
  if (skew.rows() != skew.cols() || skew.rows() == 0 || skew.rows() % 2 != 0) {
    throw Error(ErrorCode::invalid_input, "skew matrix must be square with even positive size");
  }
  const double scale = skew.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || scale == 0.0) {
    throw Error(ErrorCode::degeneracy, "skew matrix vanishes");
  }
  if ((skew + skew.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::invalid_input, "matrix is not skew-symmetric");
  }
  // M^T M = |M|^2 has each a_j^2 twice; the symmetric solve is backward stable.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(skew.transpose() * skew, Eigen::EigenvaluesOnly);
  const VectorXd& e = es.eigenvalues();
  const Index n = skew.rows() / 2;
  VectorXd a(n);
  for (Index j = 0; j < n; ++j) {
    a(j) = std::sqrt(std::max(0.0, 0.5 * (e(2 * j) + e(2 * j + 1))));
    if (a(j) < 1e-10 * scale) {
      throw Error(ErrorCode::degeneracy, "skew matrix has a vanishing invariant (B degenerate)");
    }
  }
  return a;
}

LandauSet landau_levels(const VectorXd& a, const VectorXd& v, double cutoff) {
  if (a.size() == 0 || v.size() == 0) {
    throw Error(ErrorCode::invalid_input, "need at least one invariant and one potential branch");
  }
  if (!(a.minCoeff() > 0.0) || !a.allFinite()) {
    throw Error(ErrorCode::invalid_input, "Landau invariants a_j must be positive");
  }
  LandauSet out;
  out.cutoff = cutoff;
  const Index n = a.size();
  const double base = a.sum();
  std::vector<int> k(static_cast<std::size_t>(n), 0);

  for (Index mu = 0; mu < v.size(); ++mu) {
    const double lowest = base + v(mu);
    if (lowest > cutoff) continue;
    // Walk k_j in lexicographic order with the remaining energy budget.
    std::function<void(Index, double)> walk = [&](Index j, double budget) {
      if (j == n) {
        out.levels.push_back({cutoff - budget, k, static_cast<int>(mu)});
        return;
      }
      for (int kj = 0; 2.0 * kj * a(j) <= budget; ++kj) {
        k[static_cast<std::size_t>(j)] = kj;
        walk(j + 1, budget - 2.0 * kj * a(j));
      }
      k[static_cast<std::size_t>(j)] = 0;
    };
    walk(0, cutoff - lowest);
  }
  // Recompute lambda directly so it carries no accumulated budget rounding.
  for (LandauLevel& level : out.levels) {
    double lambda = v(level.mu);
    for (Index j = 0; j < n; ++j) lambda += (2.0 * level.k[static_cast<std::size_t>(j)] + 1.0) * a(j);
    level.lambda = lambda;
  }
  std::erase_if(out.levels, [&](const LandauLevel& l) { return l.lambda > cutoff; });
  std::sort(out.levels.begin(), out.levels.end(), [](const LandauLevel& x, const LandauLevel& y) {
    if (x.lambda != y.lambda) return x.lambda < y.lambda;
    if (x.mu != y.mu) return x.mu < y.mu;
    return x.k < y.k;
  });
  return out;
}

SigmaUnion merge_intervals(std::vector<SigmaInterval> pieces, double cutoff) {
  SigmaUnion out;
  out.cutoff = cutoff;
  std::sort(pieces.begin(), pieces.end(), [](const SigmaInterval& x, const SigmaInterval& y) {
    return x.lower < y.lower || (x.lower == y.lower && x.upper < y.upper);
  });
  out.branches = pieces;
  for (const SigmaInterval& piece : pieces) {
    if (!out.intervals.empty() && piece.lower <= out.intervals.back().upper) {
      SigmaInterval& last = out.intervals.back();
      last.upper = std::max(last.upper, piece.upper);
      last.branches.insert(last.branches.end(), piece.branches.begin(), piece.branches.end());
    } else {
      out.intervals.push_back(piece);
    }
  }
  return out;
}

namespace {

// Connected components of a mask under 4-neighbour adjacency.
std::vector<std::vector<Index>> components(const Lattice& lattice, const SiteMask& mask) {
  std::vector<int> label(static_cast<std::size_t>(lattice.sites()), -1);
  std::vector<std::vector<Index>> out;
  std::vector<Index> stack;
  for (Index s = 0; s < lattice.sites(); ++s) {
    if (!mask(s) || label[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    stack.push_back(s);
    label[static_cast<std::size_t>(s)] = id;
    while (!stack.empty()) {
      const Index cur = stack.back();
      stack.pop_back();
      out.back().push_back(cur);
      for (Direction d : kAllDirections) {
        const Index t = lattice.neighbor(cur, d);
        if (t >= 0 && mask(t) && label[static_cast<std::size_t>(t)] < 0) {
          label[static_cast<std::size_t>(t)] = id;
          stack.push_back(t);
        }
      }
    }
  }
  return out;
}

}  // namespace

SigmaUnion sigma_region(const Lattice& lattice, const ScalarField& b, const PotentialField& v,
                        const SiteMask& region, double cutoff) {
  if (region.size() != lattice.sites() || b.values.size() != lattice.sites() ||
      v.sites() != lattice.sites()) {
    throw Error(ErrorCode::invalid_input, "region, field and potential must match the lattice");
  }
  if (!region.any()) throw Error(ErrorCode::empty_region, "sigma region is empty");

  const MatrixXd vmu = v.eigenvalues();
  std::vector<SigmaInterval> pieces;
  for (const auto& comp : components(lattice, region)) {
    for (int mu = 0; mu < v.rank; ++mu) {
      for (int k = 0;; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Index s : comp) {
          const double bs = b.values(s);
          if (!(bs > 0.0)) throw Error(ErrorCode::positivity_violation, "b <= 0 on region");
          const double lambda = (2.0 * k + 1.0) * bs + vmu(mu, s);
          lo = std::min(lo, lambda);
          hi = std::max(hi, lambda);
        }
        if (lo > cutoff) break;
        pieces.push_back({lo, std::min(hi, cutoff), {{k, mu}}});
      }
    }
  }
  SigmaUnion out = merge_intervals(std::move(pieces), cutoff);
  std::ostringstream os;
  os << region.count() << " of " << lattice.sites() << " sites";
  out.region = os.str();
  return out;
}

double default_cutoff(double window_top, const ScalarField& b, const SiteMask& region) {
  double bmax = 0.0;
  for (Index s = 0; s < region.size(); ++s) {
    if (region(s)) bmax = std::max(bmax, b.values(s));
  }
  return window_top + 2.0 * bmax;
}

InterfaceSet interface_set(const Lattice& lattice, const ScalarField& b, const PotentialField& v,
                           double window_lo, double window_hi, double cutoff) {
  if (!(window_lo < window_hi) || !(window_hi <= cutoff)) {
    throw Error(ErrorCode::invalid_window, "need a < b <= cutoff for the interface window");
  }
  const MatrixXd vmu = v.eigenvalues();
  InterfaceSet out;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  out.mask = SiteMask::Constant(lattice.sites(), false);
  VectorXd a(1);
  for (Index s = 0; s < lattice.sites(); ++s) {
    a(0) = b.values(s);
    const LandauSet levels = landau_levels(a, vmu.col(s), cutoff);
    out.mask(s) = std::any_of(levels.levels.begin(), levels.levels.end(),
                              [&](const LandauLevel& l) {
                                return l.lambda >= window_lo && l.lambda <= window_hi;
                              });
  }
  out.complement = !out.mask;
  if (out.mask.any()) out.distance = distance_to_set(lattice, out.mask);
  return out;
}

double dist_to_sigma(double lambda, const SigmaUnion& sigma) {
  if (sigma.empty()) throw Error(ErrorCode::empty_set, "sigma is empty");
  double best = std::numeric_limits<double>::infinity();
  for (const SigmaInterval& iv : sigma.intervals) {
    const double d = lambda < iv.lower ? iv.lower - lambda : (lambda > iv.upper ? lambda - iv.upper : 0.0);
    best = std::min(best, d);
  }
  return best;
}

bool beyond_cutoff(double lambda, const SigmaUnion& sigma) { return lambda > sigma.cutoff; }

BranchLabel nearest_branch(double lambda, const SigmaUnion& sigma) {
  if (sigma.branches.empty()) throw Error(ErrorCode::empty_set, "sigma is empty");
  double best = std::numeric_limits<double>::infinity();
  BranchLabel label;
  for (const SigmaInterval& iv : sigma.branches) {
    const double d = lambda < iv.lower ? iv.lower - lambda : (lambda > iv.upper ? lambda - iv.upper : 0.0);
    if (d < best) {
      best = d;
      label = iv.branches.front();
    }
  }
  return label;
}

std::vector<OpenInterval> find_gaps(const SigmaUnion& sigma) {
  std::vector<OpenInterval> gaps;
  for (std::size_t i = 1; i < sigma.intervals.size(); ++i) {
    gaps.push_back({sigma.intervals[i - 1].upper, sigma.intervals[i].lower});
  }
  return gaps;
}

SiteMask omega_neighbourhood(const Lattice& lattice, const SiteMask& omega, double radius) {
  if (!omega.any()) return SiteMask::Constant(lattice.sites(), false);
  const DistanceField d = distance_to_set(lattice, omega);
  return d.values.array() <= radius;
}

std::vector<std::vector<std::pair<int, int>>> run_length_rows(const Lattice& lattice,
                                                              const SiteMask& mask) {
  std::vector<std::vector<std::pair<int, int>>> rows(static_cast<std::size_t>(lattice.rows()));
  for (int r = 0; r < lattice.rows(); ++r) {
    int start = -1;
    for (int c = 0; c <= lattice.cols(); ++c) {
      const bool on = c < lattice.cols() && mask(lattice.site_at(c, r));
      if (on && start < 0) start = c;
      if (!on && start >= 0) {
        rows[static_cast<std::size_t>(r)].emplace_back(start, c - start);
        start = -1;
      }
    }
  }
  return rows;
}

}  // namespace bochner
