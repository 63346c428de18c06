#include "bochner/localization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "bochner/error.hpp"

namespace bochner {

ClusterReport cluster_assign(const SpectrumSlice& slice, const SigmaUnion& sigma) {
  if (slice.pairs.empty()) throw Error(ErrorCode::invalid_input, "cluster_assign needs a non-empty slice");
  if (sigma.empty()) throw Error(ErrorCode::empty_set, "cluster_assign needs a non-empty sigma");
  ClusterReport out;
  out.interval_counts.assign(sigma.intervals.size(), 0);
  double total = 0.0;
  for (const EigenPair& pr : slice.pairs) {
    const double lambda = pr.lambda;
    const double d = dist_to_sigma(lambda, sigma);
    out.distances.push_back(d);
    out.nearest.push_back(nearest_branch(lambda, sigma));
    out.truncated = out.truncated || beyond_cutoff(lambda, sigma);
    out.max_distance = std::max(out.max_distance, d);
    total += d;
    bool placed = false;
    for (std::size_t k = 0; k < sigma.intervals.size() && !placed; ++k) {
      if (lambda >= sigma.intervals[k].lower && lambda <= sigma.intervals[k].upper) {
        ++out.interval_counts[k];
        placed = true;
      }
    }
    if (!placed) ++out.outside;
  }
  out.mean_distance = total / static_cast<double>(slice.pairs.size());
  return out;
}

VectorXd site_density(const VectorXcd& u, Index sites) {
  if (sites <= 0 || u.size() % sites != 0) {
    throw Error(ErrorCode::invalid_input, "vector length is not a multiple of the site count");
  }
  const Index r = u.size() / sites;
  VectorXd rho = VectorXd::Zero(sites);
  for (Index s = 0; s < sites; ++s) {
    for (Index a = 0; a < r; ++a) rho(s) += std::norm(u(s * r + a));
  }
  return rho;
}

double weighted_mass(const VectorXcd& u, const DistanceField& d, double c, double p) {
  if (c < 0.0 || !std::isfinite(c)) throw Error(ErrorCode::invalid_rate, "rate c must be >= 0");
  const VectorXd rho = site_density(u, d.values.size());
  const double norm = rho.sum();
  if (!(norm > 0.0)) throw Error(ErrorCode::invalid_input, "weighted_mass needs u != 0");
  if (c == 0.0) return 1.0;
  const double rate = 2.0 * c * std::sqrt(p);
  double peak = -std::numeric_limits<double>::infinity();
  for (Index s = 0; s < rho.size(); ++s) {
    if (rho(s) > 0.0) peak = std::max(peak, rate * d.values(s));
  }
  double acc = 0.0;
  double den = 0.0;
  for (Index s = 0; s < rho.size(); ++s) {
    if (rho(s) > 0.0) acc += rho(s) * std::exp(rate * d.values(s) - peak);
    den += rho(s);
  }
  return std::exp(std::log(acc / den) + peak);
}

double decay_fit(const VectorXcd& u, const DistanceField& d, double shell_width, double floor,
                 double max_distance) {
  if (!(shell_width > 0.0)) throw Error(ErrorCode::invalid_input, "shell width must be positive");
  const VectorXd rho = site_density(u, d.values.size());
  struct Shell {
    double mass = 0.0;
    double dist = 0.0;
    Index count = 0;
  };
  std::map<long, Shell> shells;
  for (Index s = 0; s < rho.size(); ++s) {
    const double ds = d.values(s);
    if (!std::isfinite(ds) || ds > max_distance) continue;
    Shell& sh = shells[static_cast<long>(std::floor(ds / shell_width))];
    sh.mass += rho(s);
    sh.dist += ds;
    ++sh.count;
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [k, sh] : shells) {
    const double rms = std::sqrt(sh.mass / static_cast<double>(sh.count));
    if (rms > floor) {
      xs.push_back(sh.dist / static_cast<double>(sh.count));
      ys.push_back(std::log(rms));
    }
  }
  if (xs.size() < 4) {
    throw Error(ErrorCode::insufficient_data,
                "decay fit has " + std::to_string(xs.size()) + " usable shells, needs 4");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

NormBoundTrial norm_lower_bound_trial(const SparseHermitian& h, const SiteMask& omega,
                                      const SigmaUnion& sigma_omega, double lambda,
                                      const VectorXcd& u) {
  const Index sites = omega.size();
  if (sites == 0 || u.size() != h.dim() || u.size() % sites != 0) {
    throw Error(ErrorCode::invalid_input, "trial vector does not match operator and mask");
  }
  const Index r = u.size() / sites;
  for (Index s = 0; s < sites; ++s) {
    if (omega(s)) continue;
    for (Index a = 0; a < r; ++a) {
      if (std::abs(u(s * r + a)) > 1e-14) {
        throw Error(ErrorCode::support, "trial vector leaks outside Omega at site " + std::to_string(s));
      }
    }
  }
  const double norm = u.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::invalid_input, "trial vector vanishes");
  NormBoundTrial out;
  out.ratio = (h.matrix * u - lambda * u).norm() / norm;
  out.distance = dist_to_sigma(lambda, sigma_omega);
  out.bound_gap = (out.distance - out.ratio) * std::pow(static_cast<double>(h.meta.p), 0.25);
  return out;
}

double scaling_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw Error(ErrorCode::invalid_data, "scaling fit needs >= 2 points");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [p, v] : points) {
    if (!(p > 0.0) || !(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_data, "scaling fit needs positive p and values");
    }
    mx += std::log(p);
    my += std::log(v);
  }
  const auto n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [p, v] : points) {
    sxy += (std::log(p) - mx) * (std::log(v) - my);
    sxx += (std::log(p) - mx) * (std::log(p) - mx);
  }
  if (sxx == 0.0) throw Error(ErrorCode::invalid_data, "scaling fit needs distinct p");
  return sxy / sxx;
}

double boundary_fraction(const Lattice& lattice, const VectorXcd& u, double layer) {
  if (lattice.is_torus()) return 0.0;
  const VectorXd rho = site_density(u, lattice.sites());
  double near = 0.0;
  for (Index s = 0; s < lattice.sites(); ++s) {
    if (lattice.boundary_distance(s) <= layer) near += rho(s);
  }
  return near / rho.sum();
}

BoundaryPartition boundary_filter(const SpectrumSlice& slice, const Lattice& lattice, double p,
                                  double b_max) {
  BoundaryPartition out;
  out.kept = slice;
  out.artifacts = slice;
  out.artifacts.pairs.clear();
  out.layer = 3.0 / std::sqrt(p * b_max);
  if (lattice.is_torus()) {
    out.kept_fraction.assign(slice.pairs.size(), 0.0);
    return out;
  }
  out.kept.pairs.clear();
  for (const EigenPair& pr : slice.pairs) {
    const double f = boundary_fraction(lattice, pr.vector, out.layer);
    if (f > 0.5) {
      out.artifacts.pairs.push_back(pr);
      out.artifact_fraction.push_back(f);
    } else {
      out.kept.pairs.push_back(pr);
      out.kept_fraction.push_back(f);
    }
  }
  return out;
}

LocalizationEntry localize(const Lattice& lattice, const EigenPair& pair, const DistanceField& d,
                           double p, double b_min, double b_max,
                           const LocalizationSettings& settings) {
  LocalizationEntry out;
  for (int k = 0; k < settings.c_steps; ++k) {
    const double c = settings.c_max * k / std::max(1, settings.c_steps - 1);
    const double w = weighted_mass(pair.vector, d, c, p);
    out.c_grid.push_back(c);
    out.weighted.push_back(w);
    if (w <= settings.c_cap) out.c_star = c;
  }
  out.w_at_cmin = weighted_mass(pair.vector, d, settings.c_min, p);
  try {
    out.kappa = decay_fit(pair.vector, d, 2.0 * std::max(lattice.hx(), lattice.hy()), settings.floor);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::insufficient_data) throw;
  }
  const double layer = 3.0 / std::sqrt(p * b_max);
  out.boundary_fraction = boundary_fraction(lattice, pair.vector, layer);
  out.artifact = out.boundary_fraction > 0.5;
  const VectorXd rho = site_density(pair.vector, lattice.sites());
  double far = 0.0;
  for (Index s = 0; s < rho.size(); ++s) {
    if (d.values(s) > layer) far += rho(s);
  }
  out.far_fraction = far / rho.sum();
  (void)b_min;
  return out;
}

namespace {

// Separable Gaussian smoothing along one grid axis.
VectorXcd smooth_axis(const Lattice& lattice, const VectorXcd& in, bool along_x, double sigma) {
  const double h = along_x ? lattice.hx() : lattice.hy();
  const int reach = std::max(1, static_cast<int>(std::ceil(4.0 * sigma / h)));
  std::vector<double> taps(static_cast<std::size_t>(2 * reach + 1));
  for (int k = -reach; k <= reach; ++k) {
    const double x = k * h / sigma;
    taps[static_cast<std::size_t>(k + reach)] = std::exp(-0.5 * x * x);
  }
  VectorXcd out = VectorXcd::Zero(in.size());
  for (Index s = 0; s < lattice.sites(); ++s) {
    const int c = lattice.column(s);
    const int r = lattice.row(s);
    Complex acc = 0.0;
    for (int k = -reach; k <= reach; ++k) {
      const Index t = along_x ? lattice.site_at(c + k, r) : lattice.site_at(c, r + k);
      if (t >= 0) acc += taps[static_cast<std::size_t>(k + reach)] * in(t);
    }
    out(s) = acc;
  }
  return out;
}

}  // namespace

VectorXcd band_limited_trial(const Lattice& lattice, const SiteMask& omega, double bandwidth,
                             double taper, std::uint64_t seed) {
  if (!(bandwidth > 0.0) || !(taper > 0.0)) {
    throw Error(ErrorCode::invalid_input, "bandwidth and taper must be positive");
  }
  const Index n = lattice.sites();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXcd noise(n);
  for (Index s = 0; s < n; ++s) {
    const double re = normal(rng);
    const double im = normal(rng);
    noise(s) = Complex(re, im);
  }
  const double sigma = 1.0 / bandwidth;
  VectorXcd smooth = smooth_axis(lattice, smooth_axis(lattice, noise, true, sigma), false, sigma);

  const SiteMask outside = !omega;
  VectorXd mollifier = VectorXd::Ones(n);
  if (outside.any()) {
    const DistanceField d = distance_to_set(lattice, outside);
    for (Index s = 0; s < n; ++s) {
      const double t = std::min(1.0, d.values(s) / taper);
      mollifier(s) = omega(s) ? t * t * (3.0 - 2.0 * t) : 0.0;
    }
  }
  VectorXcd u = smooth.cwiseProduct(mollifier.cast<Complex>());
  for (Index s = 0; s < n; ++s) {
    if (!omega(s)) u(s) = 0.0;
  }
  const double norm = u.norm();
  if (norm > 0.0) u /= norm;
  return u;
}

VectorXcd coherent_state(const Lattice& lattice, Index center, double p, double b, Gauge gauge,
                         int rank) {
  const Eigen::Vector2d x0 = lattice.position(center);
  VectorXcd u = VectorXcd::Zero(lattice.sites() * rank);
  for (Index s = 0; s < lattice.sites(); ++s) {
    Eigen::Vector2d x = lattice.position(s);
    if (lattice.is_torus()) {
      // Nearest periodic image; the state is assumed far narrower than the torus.
      Eigen::Vector2d dx = x - x0;
      dx.x() -= lattice.extent_x() * std::round(dx.x() / lattice.extent_x());
      dx.y() -= lattice.extent_y() * std::round(dx.y() / lattice.extent_y());
      x = x0 + dx;
    }
    const Eigen::Vector2d dx = x - x0;
    // theta = theta_{x0} + d f, with theta_{x0} symmetric about x0.
    double f = 0.0;
    if (gauge == Gauge::symmetric) {
      f = 0.5 * b * (x0.x() * x.y() - x0.y() * x.x());
    } else {
      f = 0.5 * b * (x.x() * x.y() + x0.x() * x.y() - x0.y() * x.x());
    }
    u(s * rank) = std::polar(std::exp(-0.25 * p * b * dx.squaredNorm()), p * f);
  }
  return u / u.norm();
}

}  // namespace bochner
