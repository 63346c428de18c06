#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "bochner/eigensolver.hpp"

using namespace bochner;

namespace {

constexpr double kPi = std::numbers::pi;

SparseHermitian from_dense(const MatrixXcd& m) {
  SparseHermitian h;
  h.matrix = m.sparseView();
  h.matrix.makeCompressed();
  h.meta.rank = 1;
  return h;
}

SparseHermitian torus_operator(int n, int p, double b, double l = 2.0 * kPi) {
  const Lattice t = build_lattice({LatticeKind::torus, l, l, n, n});
  GaugeLinks links;
  if (b == 0.0) {
    links.p = p;
    links.phase_x = VectorXd::Zero(t.sites());
    links.phase_y = VectorXd::Zero(t.sites());
  } else {
    links = gauge_links(edge_integrals(FieldSpec::constant(b), t, Gauge::landau), p);
  }
  return assemble_H(t, links, sample_potential(PotentialSpec::zero(), t), p);
}

SparseHermitian dip_operator(int n, int p) {
  const Lattice r = build_lattice({LatticeKind::rectangle_dirichlet, 4.0, 4.0, n, n});
  const FieldSpec f = FieldSpec::radial_dip(1, 0.3, 1);
  const GaugeLinks links = gauge_links(edge_integrals(f, r, Gauge::symmetric), p);
  return assemble_H(r, links, sample_potential(PotentialSpec::radial_bump(0.5, 1), r), p);
}

VectorXd oracle(const SparseHermitian& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(h.matrix), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void check_contract(const SparseHermitian& h, const SpectrumSlice& s, double tol) {
  for (const EigenPair& pr : s.pairs) {
    CHECK(std::abs(pr.vector.norm() - 1.0) < 1e-12);
    CHECK(residual_norm(h, pr.vector, pr.lambda) <= tol);
  }
  for (std::size_t i = 1; i < s.pairs.size(); ++i) CHECK(s.pairs[i - 1].lambda <= s.pairs[i].lambda);
  CHECK(orthogonality_defect(s) < 1e-8);
}

}  // namespace

TEST_CASE("dense oracle small cases") {
  MatrixXcd one(1, 1);
  one << 2.0;
  const SpectrumSlice a = dense_spectrum(from_dense(one));
  REQUIRE(a.size() == 1);
  CHECK(a.pairs[0].lambda == doctest::Approx(2.0));
  CHECK(a.certificate == Certificate::certified);

  MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  const SpectrumSlice b = dense_spectrum(from_dense(x));
  CHECK(b.pairs[0].lambda == doctest::Approx(-1.0));
  CHECK(b.pairs[1].lambda == doctest::Approx(1.0));
  for (const auto& pr : b.pairs) CHECK(pr.residual <= 1e-14);
}

TEST_CASE("dense oracle guards") {
  SparseHermitian big;
  big.matrix.resize(4097, 4097);
  big.matrix.setIdentity();
  big.meta.rank = 1;
  try {
    dense_spectrum(big);
    FAIL("expected size error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::size);
  }
  MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  SparseHermitian nh = from_dense(x);
  nh.hermitian = false;
  try {
    dense_spectrum(nh);
    FAIL("expected flag error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::flag);
  }
}

TEST_CASE("free torus closed form") {
  // Discrete Fourier modes diagonalize the free stencil.
  const int n = 24;
  const int p = 2;
  const SparseHermitian h = torus_operator(n, p, 0.0);
  const double hs = 2.0 * kPi / n;
  const SpectrumSlice s = lowest_eigs(h, 6, 1e-10);
  REQUIRE(s.size() == 6);
  CHECK(std::abs(s.pairs[0].lambda) < 1e-9);
  const VectorXcd u0 = s.pairs[0].vector;
  CHECK((u0.cwiseAbs().array() - 1.0 / n).abs().maxCoeff() < 1e-8);
  const double first = (1.0 / p) * (2.0 / (hs * hs)) * (1.0 - std::cos(2.0 * kPi / n));
  for (int i = 1; i <= 4; ++i) CHECK(s.pairs[i].lambda == doctest::Approx(first).epsilon(1e-9));
  CHECK(s.pairs[5].lambda > first * 1.5);
}

TEST_CASE("lowest_eigs against the dense oracle") {
  for (const SparseHermitian& h : {torus_operator(16, 2, 1.0 / (2 * kPi)), dip_operator(33, 4)}) {
    REQUIRE(h.dim() <= 1024);
    const VectorXd ref = oracle(h);
    const SpectrumSlice s = lowest_eigs(h, 20);
    REQUIRE(s.size() == 20);
    for (int i = 0; i < 20; ++i) CHECK(std::abs(s.pairs[i].lambda - ref(i)) < 1e-8);
    check_contract(h, s, default_tolerance(h));
  }
}

TEST_CASE("constant field p = 8 lowest cluster count") {
  const double b = 1.0 / (2 * kPi);
  const SparseHermitian h = torus_operator(48, 8, b);
  const SpectrumSlice s = lowest_eigs(h, 12);
  int in_cluster = 0;
  for (const auto& pr : s.pairs) in_cluster += std::abs(pr.lambda - b) < 0.2 * 2 * b ? 1 : 0;
  CHECK(in_cluster == 8);
  CHECK(inertia_count(h, b + 0.4 * b) == 8);
}

TEST_CASE("window_eigs") {
  const SparseHermitian h = dip_operator(25, 3);
  const VectorXd ref = oracle(h);

  SUBCASE("window in a spectral hole") {
    Index k = 0;
    double widest = 0.0;
    for (Index i = 0; i + 1 < ref.size() && i < 60; ++i) {
      if (ref(i + 1) - ref(i) > widest) {
        widest = ref(i + 1) - ref(i);
        k = i;
      }
    }
    const double mid = 0.5 * (ref(k) + ref(k + 1));
    const SpectrumSlice s = window_eigs(h, mid - 0.25 * widest, mid + 0.25 * widest);
    CHECK(s.size() == 0);
    CHECK(s.certificate == Certificate::certified);
  }
  SUBCASE("window around a simple eigenvalue") {
    const double gap = std::min(ref(3) - ref(2), ref(4) - ref(3));
    REQUIRE(gap > 1e-6);
    const double eps = 0.3 * gap;
    const SpectrumSlice s = window_eigs(h, ref(3) - eps, ref(3) + eps);
    REQUIRE(s.size() == 1);
    CHECK(std::abs(s.pairs[0].lambda - ref(3)) < 1e-8);
    CHECK(s.certificate == Certificate::certified);
  }
  SUBCASE("wide window matches inertia") {
    const double lo = ref(5) - 1e-3, hi = ref(40) + 1e-3;
    const SpectrumSlice s = window_eigs(h, lo, hi);
    CHECK(s.certificate == Certificate::certified);
    CHECK(s.size() == inertia_count(h, hi) - inertia_count(h, lo));
    CHECK(s.size() == 36);
    for (Index i = 0; i < s.size(); ++i) CHECK(std::abs(s.pairs[i].lambda - ref(5 + i)) < 1e-8);
    check_contract(h, s, default_tolerance(h));
  }
  SUBCASE("folded fallback") {
    const SpectrumSlice s = window_eigs_folded(h, ref(2) - 1e-3, ref(4) + 1e-3, 8);
    CHECK(s.certificate == Certificate::heuristic);
    REQUIRE(s.size() == 3);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(s.pairs[i].lambda - ref(2 + i)) < 1e-7);
  }
  CHECK_THROWS_AS(window_eigs(h, 1.0, 1.0), Error);
}

TEST_CASE("polish sharpens residuals") {
  const SparseHermitian h = dip_operator(41, 8);
  SolverOptions opt;
  opt.polish_steps = 2;
  const SpectrumSlice s = lowest_eigs(h, 8, 0.0, opt);
  for (const auto& pr : s.pairs) CHECK(pr.residual < 1e-11);
  CHECK(orthogonality_defect(s) < 1e-10);
}

TEST_CASE("eigenvector dump round trip") {
  const SparseHermitian h = torus_operator(10, 1, 1.0 / (2 * kPi));
  const SpectrumSlice s = lowest_eigs(h, 4);
  const auto path = (std::filesystem::temp_directory_path() / "bochner_test_vec.bsev").string();
  write_eigenvectors(path, s);
  const SpectrumSlice back = read_eigenvectors(path);
  REQUIRE(back.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(back.pairs[i].lambda == s.pairs[i].lambda);
    CHECK(back.pairs[i].residual == s.pairs[i].residual);
    CHECK(back.pairs[i].vector == s.pairs[i].vector);
  }
  std::filesystem::resize_file(path, 40);
  CHECK_THROWS_AS(read_eigenvectors(path), Error);
  std::filesystem::remove(path);
}
