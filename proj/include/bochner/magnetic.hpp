#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bochner/lattice.hpp"
#include "bochner/types.hpp"

namespace bochner {

/// Magnetic field intensity b(x) > 0 on the 2D base.
///
/// radial profiles use e^{-|x|^2/width^2}; the transition profile is
/// b_minus + (b_plus - b_minus) * (1 + tanh(x2/width)) / 2.
struct FieldSpec {
  enum class Preset { constant, radial_dip, radial_bump, transition };

  Preset preset = Preset::constant;
  double b = 1.0;
  double b_inf = 1.0;
  double depth = 0.0;
  double height = 0.0;
  double width = 1.0;
  double b_minus = 1.0;
  double b_plus = 1.0;

  static FieldSpec constant(double b);
  static FieldSpec radial_dip(double b_inf, double depth, double width);
  static FieldSpec radial_bump(double b_inf, double height, double width);
  static FieldSpec transition(double b_minus, double b_plus, double width);

  double operator()(const Eigen::Vector2d& x) const;

  /// Exact infimum over the plane.
  double infimum() const;
  /// Exact supremum over the plane.
  double supremum() const;

  bool is_radial() const { return preset == Preset::radial_dip || preset == Preset::radial_bump; }

  std::string describe() const;
};

struct ScalarField {
  VectorXd values;            // per site
  VectorXd plaquette_values;  // per entry of Lattice::plaquettes()
};

ScalarField sample_field(const FieldSpec& spec, const Lattice& lattice);

/// Chern number of the sampled field on a torus, std::nullopt on a rectangle.
std::optional<int> check_flux_quantization(const ScalarField& b, const Lattice& lattice);

enum class Gauge { landau, symmetric };

Gauge default_gauge(const FieldSpec& spec, const Lattice& lattice);

/// Line integrals of the connection one-form along the +x and +y edge of
/// every site. The reversed edge is the negative by construction. On the
/// torus the seam edges carry the transition function of the bundle.
struct EdgeIntegrals {
  VectorXd along_x;
  VectorXd along_y;
  double total_flux = 0.0;  // flux the edges encode (quadrature)
  bool periodic = false;

  double value(const Lattice& lattice, Index site, Direction d) const;
};

EdgeIntegrals edge_integrals(const FieldSpec& spec, const Lattice& lattice, Gauge gauge);

/// U(1) links u(i->j) = exp(-i p \int_{i->j} theta), stored as phases.
struct GaugeLinks {
  VectorXd phase_x;
  VectorXd phase_y;
  int p = 1;

  double phase(const Lattice& lattice, Index site, Direction d) const;
  Complex link(const Lattice& lattice, Index site, Direction d) const;
};

GaugeLinks gauge_links(const EdgeIntegrals& ints, int p);

/// Principal argument of the counterclockwise product around each plaquette.
VectorXd plaquette_holonomy(const GaugeLinks& links, const Lattice& lattice);

/// u'(i->j) = phi(i) u(i->j) conj(phi(j)). `site_phases` are unit-modulus.
GaugeLinks apply_gauge_transform(const GaugeLinks& links, const Lattice& lattice,
                                 const VectorXcd& site_phases);

/// Endomorphism V of E: a Hermitian r x r matrix per site.
struct PotentialSpec {
  enum class Kind { zero, constant, radial_bump, per_site };

  Kind kind = Kind::zero;
  int rank = 1;
  MatrixXcd base;           // r x r constant part (zero when empty)
  double height = 0.0;      // radial bump amplitude times identity
  double width = 1.0;
  std::vector<MatrixXcd> per_site;  // Kind::per_site only

  static PotentialSpec zero(int rank = 1);
  static PotentialSpec constant(const MatrixXcd& value);
  static PotentialSpec radial_bump(double height, double width, int rank = 1);

  std::string describe() const;
};

struct PotentialField {
  int rank = 1;
  std::vector<MatrixXcd> values;

  Index sites() const { return static_cast<Index>(values.size()); }
  /// Sitewise eigenvalues V_mu(x), ascending; r x sites.
  MatrixXd eigenvalues() const;
};

PotentialField sample_potential(const PotentialSpec& spec, const Lattice& lattice);

/// Reads one site per line, 2 r^2 numbers (row-major re/im pairs).
PotentialSpec load_potential_file(const std::string& path, int rank);

}  // namespace bochner
