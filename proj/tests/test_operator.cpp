#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "bochner/error.hpp"
#include "bochner/operator.hpp"

using namespace bochner;

namespace {

constexpr double kPi = std::numbers::pi;

Lattice torus(int n, double l = 2.0 * kPi) { return build_lattice({LatticeKind::torus, l, l, n, n}); }
Lattice rect(int n, double l) { return build_lattice({LatticeKind::rectangle_dirichlet, l, l, n, n}); }

SparseHermitian build(const Lattice& lat, const FieldSpec& f, const PotentialSpec& v, int p) {
  const GaugeLinks links = gauge_links(edge_integrals(f, lat, default_gauge(f, lat)), p);
  return assemble_H(lat, links, sample_potential(v, lat), p);
}

SparseHermitian free_torus(int n, int p) {
  const Lattice t = torus(n);
  GaugeLinks links;
  links.p = p;
  links.phase_x = VectorXd::Zero(t.sites());
  links.phase_y = VectorXd::Zero(t.sites());
  return assemble_H(t, links, sample_potential(PotentialSpec::zero(), t), p);
}

VectorXd eigenvalues(const SparseHermitian& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(h.matrix), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Complex eigenvalues of a non-Hermitian operator, sorted by real part.
VectorXd general_eigenvalues(const SparseHermitian& h) {
  Eigen::ComplexEigenSolver<MatrixXcd> es(MatrixXcd(h.matrix), false);
  VectorXd re = es.eigenvalues().real();
  std::sort(re.data(), re.data() + re.size());
  return re;
}

double max_entry(const SparseMatrix& m) {
  double out = 0.0;
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

WeightField weight_from(const VectorXd& values, double p) {
  WeightField w;
  w.values = values;
  w.p = p;
  return w;
}

}  // namespace

TEST_CASE("free torus stencil") {
  const SparseHermitian h = free_torus(16, 1);
  CHECK(h.dim() == 256);
  CHECK(h.nonzeros() <= 1280);
  const VectorXcd one = VectorXcd::Ones(256);
  CHECK((h.matrix * one).norm() < 1e-12);
  CHECK(hermiticity_defect(h) == 0.0);
}

TEST_CASE("assemble_H rejects mismatched p") {
  const Lattice t = torus(8);
  const GaugeLinks links = gauge_links(edge_integrals(FieldSpec::constant(1 / (2 * kPi)), t, Gauge::landau), 2);
  try {
    assemble_H(t, links, sample_potential(PotentialSpec::zero(), t), 3);
    FAIL("expected consistency error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::consistency);
  }
}

TEST_CASE("constant field torus clusters") {
  // 48 x 48 sites, b = 1/(2 pi), p = 8: p c1 = 8 states near b and the next cluster near 3b.
  const double b = 1.0 / (2 * kPi);
  const SparseHermitian h = build(torus(48), FieldSpec::constant(b), PotentialSpec::zero(), 8);
  const VectorXd ev = eigenvalues(h);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(ev(i) - b) < 0.1 * 2 * b);
  CHECK(ev(8) > b + 0.5 * 2 * b);
  for (int i = 8; i < 16; ++i) CHECK(std::abs(ev(i) - 3 * b) < 0.2 * 2 * b);
}

TEST_CASE("hermiticity and Gershgorin enclosure") {
  const Lattice r = rect(30, 5.0);
  const int p = 4;
  const SparseHermitian h = build(r, FieldSpec::radial_dip(1, 0.3, 1), PotentialSpec::radial_bump(1, 1), p);
  CHECK(hermiticity_defect(h) <= 1e-14 * max_entry(h.matrix));
  for (Index i = 0; i < h.dim(); ++i) CHECK(h.matrix.coeff(i, i).imag() == 0.0);
  const VectorXd ev = eigenvalues(h);
  const double hx = r.hx();
  CHECK(ev.minCoeff() >= -1e-10);
  CHECK(ev.maxCoeff() <= 8.0 / (p * hx * hx) + 1.0 + 1e-10);
  const SpectralBounds g = gershgorin_bounds(h);
  CHECK(g.lower <= ev.minCoeff() + 1e-12);
  CHECK(g.upper >= ev.maxCoeff() - 1e-12);
}

TEST_CASE("gauge covariance") {
  const Lattice t = torus(20);
  const int p = 3;
  const FieldSpec f = FieldSpec::constant(2 / (2 * kPi));
  const GaugeLinks links = gauge_links(edge_integrals(f, t, Gauge::landau), p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  VectorXcd phi(t.sites());
  for (Index i = 0; i < t.sites(); ++i) phi(i) = std::polar(1.0, u(rng));
  const PotentialField v = sample_potential(PotentialSpec::zero(), t);
  const SparseHermitian h = assemble_H(t, links, v, p);
  const SparseHermitian g = assemble_H(t, apply_gauge_transform(links, t, phi), v, p);
  const MatrixXcd d = phi.asDiagonal();
  const MatrixXcd expect = d * MatrixXcd(h.matrix) * d.adjoint();
  CHECK((MatrixXcd(g.matrix) - expect).cwiseAbs().maxCoeff() < 1e-12);
  const VectorXd a = eigenvalues(h);
  const VectorXd b = eigenvalues(g);
  CHECK(((a - b).cwiseAbs().array() / a.cwiseAbs().array().max(1.0)).maxCoeff() < 1e-10);
}

TEST_CASE("conjugation is a similarity") {
  const Lattice t = torus(16, 3.0);
  const int p = 2;
  const SparseHermitian h = build(t, FieldSpec::constant(2 * kPi / 9.0), PotentialSpec::zero(), p);
  VectorXd phi(t.sites());
  for (Index i = 0; i < t.sites(); ++i) phi(i) = std::sin(t.position(i).x() * 2 * kPi / 3.0);
  const WeightField w = weight_from(phi, p);

  const SparseHermitian same = conjugate_H(h, w, 0.0, p);
  CHECK(same.hermitian);
  CHECK(MatrixXcd(same.matrix) == MatrixXcd(h.matrix));

  const SparseHermitian c = conjugate_H(h, w, 0.3, p);
  CHECK_FALSE(c.hermitian);
  for (Index i = 0; i < h.dim(); ++i) CHECK(c.matrix.coeff(i, i) == h.matrix.coeff(i, i));
  const VectorXd a = eigenvalues(h);
  const VectorXd b = general_eigenvalues(c);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);

  CHECK_THROWS_AS(conjugate_H(h, weight_from(phi * 1e3, p), 1.0, p), Error);
}

TEST_CASE("taylor terms") {
  SUBCASE("constant weight gives zero terms") {
    const SparseHermitian h = free_torus(8, 2);
    const TaylorTerms t = taylor_terms(h, weight_from(VectorXd::Constant(64, 0.4), 2), 2);
    CHECK(max_entry(t.first.matrix) == 0.0);
    CHECK(max_entry(t.second.matrix) == 0.0);
  }
  SUBCASE("B on a linear weight is -|grad phi|^2") {
    const Lattice r = rect(40, 2.0);
    const int p = 3;
    GaugeLinks links;
    links.p = p;
    links.phase_x = VectorXd::Zero(r.sites());
    links.phase_y = VectorXd::Zero(r.sites());
    const SparseHermitian h = assemble_H(r, links, sample_potential(PotentialSpec::zero(), r), p);
    VectorXd phi(r.sites());
    for (Index i = 0; i < r.sites(); ++i) phi(i) = r.position(i).x();
    const TaylorTerms t = taylor_terms(h, weight_from(phi, p), p);
    const VectorXcd y = t.second.matrix * VectorXcd::Ones(r.sites());
    for (Index i = 0; i < r.sites(); ++i) {
      if (r.boundary_distance(i) < 2 * r.hx()) continue;
      CHECK(y(i).real() == doctest::Approx(-1.0).epsilon(1e-10));
    }
  }
  SUBCASE("third order remainder") {
    const Lattice t = torus(24);
    const int p = 4;
    const SparseHermitian h = build(t, FieldSpec::constant(1 / (2 * kPi)), PotentialSpec::zero(), p);
    VectorXd phi(t.sites());
    for (Index i = 0; i < t.sites(); ++i) phi(i) = std::cos(t.position(i).x()) + 0.5 * std::sin(t.position(i).y());
    const WeightField w = weight_from(phi, p);
    const TaylorTerms terms = taylor_terms(h, w, p);
    auto remainder = [&](double tau) {
      const SparseMatrix approx =
          h.matrix + (tau / std::sqrt(double(p))) * terms.first.matrix + (tau * tau) * terms.second.matrix;
      return max_entry(conjugate_H(h, w, tau, p).matrix - approx);
    };
    const double ratio = remainder(1e-2) / remainder(5e-3);
    CHECK(ratio == doctest::Approx(8.0).epsilon(0.05));
  }
}

TEST_CASE("operator dump round trip") {
  const SparseHermitian h = build(rect(12, 3.0), FieldSpec::radial_dip(1, 0.3, 1), PotentialSpec::radial_bump(1, 1), 5);
  const auto path = (std::filesystem::temp_directory_path() / "bochner_test_op.bshp").string();
  write_operator(path, h);
  const SparseHermitian back = read_operator(path);
  CHECK(back.hermitian);
  CHECK(back.dim() == h.dim());
  CHECK(MatrixXcd(back.matrix) == MatrixXcd(h.matrix));
  {
    std::ofstream bad(path, std::ios::binary);
    bad << "NOPE";
  }
  CHECK_THROWS_AS(read_operator(path), Error);
  std::filesystem::remove(path);
}
