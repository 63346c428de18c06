#include "bochner/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "bochner/error.hpp"

namespace bochner {

Lattice::Lattice(const LatticeSpec& spec) : spec_(spec) {
  if (!(spec.extent_x > 0.0) || !(spec.extent_y > 0.0) || !std::isfinite(spec.extent_x) ||
      !std::isfinite(spec.extent_y)) {
    throw Error(ErrorCode::invalid_spec, "lattice extents must be positive and finite");
  }
  if (spec.nx < 2 || spec.ny < 2) {
    throw Error(ErrorCode::invalid_spec, "lattice needs nx, ny >= 2");
  }
  hx_ = spec.extent_x / spec.nx;
  hy_ = spec.extent_y / spec.ny;
  if (is_torus()) {
    cols_ = spec.nx;
    rows_ = spec.ny;
  } else {
    cols_ = spec.nx - 1;
    rows_ = spec.ny - 1;
  }

  for (Index s = 0; s < sites(); ++s) {
    const Index right = neighbor(s, Direction::plus_x);
    const Index up = neighbor(s, Direction::plus_y);
    if (right >= 0 && up >= 0 && neighbor(right, Direction::plus_y) >= 0) {
      plaquettes_.push_back(s);
    }
  }
}

double Lattice::spacing(Direction d) const {
  return (d == Direction::plus_x || d == Direction::minus_x) ? hx_ : hy_;
}

Index Lattice::site_at(int col, int row) const {
  if (is_torus()) {
    col = ((col % cols_) + cols_) % cols_;
    row = ((row % rows_) + rows_) % rows_;
  } else if (col < 0 || col >= cols_ || row < 0 || row >= rows_) {
    return -1;
  }
  return static_cast<Index>(row) * cols_ + col;
}

Index Lattice::neighbor(Index site, Direction d) const {
  int c = column(site);
  int r = row(site);
  switch (d) {
    case Direction::plus_x: ++c; break;
    case Direction::minus_x: --c; break;
    case Direction::plus_y: ++r; break;
    case Direction::minus_y: --r; break;
  }
  return site_at(c, r);
}

bool Lattice::crosses_seam(Index site, Direction d) const {
  if (!is_torus()) return false;
  switch (d) {
    case Direction::plus_x: return column(site) == cols_ - 1;
    case Direction::minus_x: return column(site) == 0;
    case Direction::plus_y: return row(site) == rows_ - 1;
    case Direction::minus_y: return row(site) == 0;
  }
  return false;
}

Eigen::Vector2d Lattice::position(Index site) const {
  const double c = column(site);
  const double r = row(site);
  if (is_torus()) return {c * hx_, r * hy_};
  return {(c + 1.0) * hx_ - 0.5 * spec_.extent_x, (r + 1.0) * hy_ - 0.5 * spec_.extent_y};
}

double Lattice::boundary_distance(Index site) const {
  if (is_torus()) return std::numeric_limits<double>::infinity();
  const Eigen::Vector2d x = position(site);
  const double dx = 0.5 * spec_.extent_x - std::abs(x.x());
  const double dy = 0.5 * spec_.extent_y - std::abs(x.y());
  return std::min(dx, dy);
}

Eigen::Vector2d Lattice::plaquette_center(Index lower_left) const {
  return position(lower_left) + Eigen::Vector2d(0.5 * hx_, 0.5 * hy_);
}

Index Lattice::edge_count() const {
  Index n = 0;
  for (Index s = 0; s < sites(); ++s) {
    if (neighbor(s, Direction::plus_x) >= 0) ++n;
    if (neighbor(s, Direction::plus_y) >= 0) ++n;
  }
  return n;
}

Lattice build_lattice(const LatticeSpec& spec) { return Lattice(spec); }

DistanceField distance_to_set(const Lattice& lattice, const SiteMask& mask) {
  const Index n = lattice.sites();
  if (mask.size() != n) {
    throw Error(ErrorCode::invalid_input, "mask size does not match lattice");
  }
  if (!mask.any()) {
    throw Error(ErrorCode::empty_target, "distance target mask is empty");
  }

  const double hx = lattice.hx();
  const double hy = lattice.hy();
  const double hd = std::hypot(hx, hy);
  struct Step {
    int dc, dr;
    double w;
  };
  const std::array<Step, 8> steps = {{{1, 0, hx},
                                      {-1, 0, hx},
                                      {0, 1, hy},
                                      {0, -1, hy},
                                      {1, 1, hd},
                                      {1, -1, hd},
                                      {-1, 1, hd},
                                      {-1, -1, hd}}};

  DistanceField out;
  out.target = mask;
  out.values = VectorXd::Constant(n, std::numeric_limits<double>::infinity());

  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (Index s = 0; s < n; ++s) {
    if (mask(s)) {
      out.values(s) = 0.0;
      queue.emplace(0.0, s);
    }
  }
  while (!queue.empty()) {
    const auto [dist, s] = queue.top();
    queue.pop();
    if (dist > out.values(s)) continue;
    const int c = lattice.column(s);
    const int r = lattice.row(s);
    for (const Step& st : steps) {
      const Index t = lattice.site_at(c + st.dc, r + st.dr);
      if (t < 0) continue;
      const double cand = dist + st.w;
      if (cand < out.values(t)) {
        out.values(t) = cand;
        queue.emplace(cand, t);
      }
    }
  }
  return out;
}

WeightField smooth_distance(const Lattice& lattice, const DistanceField& dist, double p) {
  if (!(p >= 1.0)) {
    throw Error(ErrorCode::invalid_input, "smooth_distance requires p >= 1");
  }
  const double h = std::max(lattice.hx(), lattice.hy());
  const double radius = std::min(0.5 / std::sqrt(p), 10.0 * h);

  WeightField out;
  out.p = p;
  out.radius = radius;
  if (radius < h) {
    out.degraded = true;
    out.values = dist.values;
    return out;
  }

  // Compact (1 - (s/rho)^2)^2 bump, renormalized over in-domain sites.
  struct Tap {
    int dc, dr;
    double w;
  };
  std::vector<Tap> taps;
  const int kc = static_cast<int>(std::floor(radius / lattice.hx()));
  const int kr = static_cast<int>(std::floor(radius / lattice.hy()));
  for (int dr = -kr; dr <= kr; ++dr) {
    for (int dc = -kc; dc <= kc; ++dc) {
      const double s = std::hypot(dc * lattice.hx(), dr * lattice.hy());
      if (s >= radius) continue;
      const double q = 1.0 - (s / radius) * (s / radius);
      taps.push_back({dc, dr, q * q});
    }
  }

  const Index n = lattice.sites();
  out.values.resize(n);
  for (Index i = 0; i < n; ++i) {
    const int c = lattice.column(i);
    const int r = lattice.row(i);
    double acc = 0.0;
    double norm = 0.0;
    for (const Tap& t : taps) {
      const Index j = lattice.site_at(c + t.dc, r + t.dr);
      if (j < 0) continue;
      acc += t.w * dist.values(j);
      norm += t.w;
    }
    const double d = dist.values(i);
    out.values(i) = std::clamp(acc / norm, d - radius, d + radius);
  }
  return out;
}

}  // namespace bochner
