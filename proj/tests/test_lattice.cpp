#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bochner/error.hpp"
#include "bochner/lattice.hpp"

using namespace bochner;

namespace {

Lattice torus(int n, double l = 2.0 * std::numbers::pi) {
  return build_lattice({LatticeKind::torus, l, l, n, n});
}

Lattice rect(int n, double l) { return build_lattice({LatticeKind::rectangle_dirichlet, l, l, n, n}); }

// Relaxes every 8-neighbour edge until nothing changes; no priority queue.
VectorXd bellman_ford(const Lattice& lat, const SiteMask& mask) {
  const Index n = lat.sites();
  VectorXd d = VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < n; ++i) {
    if (mask(i)) d(i) = 0.0;
  }
  const double diag = std::hypot(lat.hx(), lat.hy());
  bool changed = true;
  while (changed) {
    changed = false;
    for (Index i = 0; i < n; ++i) {
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const Index j = lat.site_at(lat.column(i) + dc, lat.row(i) + dr);
          if (j < 0) continue;
          const double w = (dr != 0 && dc != 0) ? diag : (dc != 0 ? lat.hx() : lat.hy());
          if (d(j) + w < d(i)) {
            d(i) = d(j) + w;
            changed = true;
          }
        }
      }
    }
  }
  return d;
}

SiteMask single(const Lattice& lat, Index i) {
  SiteMask m = SiteMask::Constant(lat.sites(), false);
  m(i) = true;
  return m;
}

}  // namespace

TEST_CASE("build_lattice counts and spacing") {
  const Lattice t = torus(64);
  CHECK(t.sites() == 4096);
  CHECK(t.hx() == doctest::Approx(2.0 * std::numbers::pi / 64));

  const Lattice r = rect(4, 1.0);
  CHECK(r.sites() == 9);
  for (Index i = 0; i < r.sites(); ++i) {
    int in = 0;
    for (Direction d : kAllDirections) in += r.neighbor(i, d) >= 0 ? 1 : 0;
    CHECK(in <= 4);
  }
  // centre site has all four, corners have two
  int full = 0;
  for (Direction d : kAllDirections) full += r.neighbor(4, d) >= 0 ? 1 : 0;
  CHECK(full == 4);
  int corner = 0;
  for (Direction d : kAllDirections) corner += r.neighbor(0, d) >= 0 ? 1 : 0;
  CHECK(corner == 2);
}

TEST_CASE("build_lattice rejects bad specs") {
  auto code = [](const LatticeSpec& s) {
    try {
      build_lattice(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  CHECK(code({LatticeKind::torus, 1.0, 1.0, 0, 4}) == ErrorCode::invalid_spec);
  CHECK(code({LatticeKind::torus, 1.0, 1.0, 4, 1}) == ErrorCode::invalid_spec);
  CHECK(code({LatticeKind::torus, -1.0, 1.0, 4, 4}) == ErrorCode::invalid_spec);
}

TEST_CASE("torus neighbours wrap, rectangle is centred") {
  const Lattice t = torus(8);
  for (Index i = 0; i < t.sites(); ++i) {
    for (Direction d : kAllDirections) CHECK(t.neighbor(i, d) >= 0);
  }
  CHECK(t.neighbor(7, Direction::plus_x) == 0);
  CHECK(t.position(9).isApprox(Eigen::Vector2d(t.hx(), t.hy())));

  const Lattice r = rect(10, 2.0);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (Index i = 0; i < r.sites(); ++i) mean += r.position(i);
  CHECK((mean / double(r.sites())).norm() < 1e-12);
}

TEST_CASE("distance_to_set small cases") {
  const Lattice t = torus(16);
  const double h = t.hx();
  const Index c = t.site_at(5, 5);
  const DistanceField d = distance_to_set(t, single(t, c));
  CHECK(d.values(c) == 0.0);
  CHECK(d.values(t.site_at(6, 5)) == doctest::Approx(h));
  CHECK(d.values(t.site_at(6, 6)) == doctest::Approx(h * std::sqrt(2.0)));
  CHECK(d.values(t.site_at(7, 5)) == doctest::Approx(2 * h));

  SiteMask empty = SiteMask::Constant(t.sites(), false);
  CHECK_THROWS_AS(distance_to_set(t, empty), Error);
}

TEST_CASE("distance_to_set matches brute force relaxation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    const bool is_torus = trial % 2 == 0;
    const int n = 12 + 4 * trial;
    const Lattice lat = is_torus ? torus(n, 3.0) : rect(n, 3.0);
    SiteMask m = SiteMask::Constant(lat.sites(), false);
    std::uniform_int_distribution<Index> pick(0, lat.sites() - 1);
    for (int k = 0; k < 3; ++k) m(pick(rng)) = true;
    const DistanceField d = distance_to_set(lat, m);
    const VectorXd ref = bellman_ford(lat, m);
    CHECK((d.values - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("distance_to_set is symmetric and Lipschitz") {
  const Lattice t = torus(20, 5.0);
  const Index a = t.site_at(3, 4);
  const Index b = t.site_at(15, 11);
  const double ab = distance_to_set(t, single(t, a)).values(b);
  const double ba = distance_to_set(t, single(t, b)).values(a);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-14));

  const DistanceField d = distance_to_set(t, single(t, a));
  for (Index i = 0; i < t.sites(); ++i) {
    CHECK(d.values(i) >= 0.0);
    for (Direction dir : kAllDirections) {
      const Index j = t.neighbor(i, dir);
      CHECK(std::abs(d.values(i) - d.values(j)) <= 1.08 * t.spacing(dir) + 1e-12);
    }
  }
}

TEST_CASE("smooth_distance invariants") {
  SUBCASE("p = 16, h = 1/64 gives rho = 1/8") {
    const Lattice r = rect(128, 2.0);
    REQUIRE(r.hx() == doctest::Approx(1.0 / 64));
    const DistanceField d = distance_to_set(r, single(r, r.site_at(63, 63)));
    const WeightField w = smooth_distance(r, d, 16);
    CHECK_FALSE(w.degraded);
    CHECK(w.radius == doctest::Approx(0.125));
    CHECK((w.values - d.values).cwiseAbs().maxCoeff() <= 0.125 + 1e-12);
  }
  SUBCASE("cone gradient bound") {
    const Lattice r = rect(201, 4.0);
    const DistanceField d = distance_to_set(r, single(r, r.site_at(99, 99)));
    const WeightField w = smooth_distance(r, d, 4);
    for (Index i = 0; i < r.sites(); ++i) {
      for (Direction dir : kAllDirections) {
        const Index j = r.neighbor(i, dir);
        if (j < 0) continue;
        CHECK(std::abs(w.values(i) - w.values(j)) <= 1.2 * r.spacing(dir));
      }
    }
  }
  SUBCASE("constant distance is preserved") {
    const Lattice t = torus(32, 4.0);
    DistanceField d;
    d.values = VectorXd::Constant(t.sites(), 0.7);
    d.target = SiteMask::Constant(t.sites(), false);
    const WeightField w = smooth_distance(t, d, 4);
    CHECK((w.values.array() - 0.7).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("coarse lattice degrades") {
    const Lattice t = torus(8, 8.0);
    const DistanceField d = distance_to_set(t, single(t, 0));
    const WeightField w = smooth_distance(t, d, 64);
    CHECK(w.degraded);
    CHECK(w.values == d.values);
  }
  SUBCASE("range stays inside the stencil range") {
    const Lattice r = rect(60, 3.0);
    const DistanceField d = distance_to_set(r, single(r, r.site_at(10, 40)));
    const WeightField w = smooth_distance(r, d, 9);
    CHECK(w.values.minCoeff() >= d.values.minCoeff() - 1e-12);
    CHECK(w.values.maxCoeff() <= d.values.maxCoeff() + 1e-12);
  }
}
