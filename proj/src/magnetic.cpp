#include "bochner/magnetic.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bochner/error.hpp"

namespace bochner {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Two-point Gauss-Legendre nodes on [0, 1], weights 1/2 each.
constexpr double kGaussLo = 0.5 - 0.5 / std::numbers::sqrt3;
constexpr double kGaussHi = 0.5 + 0.5 / std::numbers::sqrt3;

// (1 - e^{-s}) / s, finite at s = 0.
double expm1_ratio(double s) { return s < 1e-12 ? 1.0 - 0.5 * s : -std::expm1(-s) / s; }

// Amplitude A of the Gaussian part, b = b_inf + A e^{-r^2/w^2}.
double radial_amplitude(const FieldSpec& f) {
  return f.preset == FieldSpec::Preset::radial_dip ? -f.depth : f.height;
}

// f(r) with theta = f(r) (x1 dx2 - x2 dx1) and d theta = b: f r^2 = \int_0^r b(s) s ds.
double symmetric_profile(const FieldSpec& f, double r2) {
  switch (f.preset) {
    case FieldSpec::Preset::constant: return 0.5 * f.b;
    case FieldSpec::Preset::radial_dip:
    case FieldSpec::Preset::radial_bump: {
      const double w2 = f.width * f.width;
      return 0.5 * f.b_inf + 0.5 * radial_amplitude(f) * expm1_ratio(r2 / w2);
    }
    case FieldSpec::Preset::transition: break;
  }
  throw Error(ErrorCode::unsupported_gauge, "symmetric gauge needs a radial or constant field");
}

double transition_profile(const FieldSpec& f, double x2) {
  if (f.preset == FieldSpec::Preset::constant) return f.b;
  return f.b_minus + (f.b_plus - f.b_minus) * 0.5 * (1.0 + std::tanh(x2 / f.width));
}

double gauss_edge(double a, double h, auto&& fn) {
  return 0.5 * h * (fn(a + kGaussLo * h) + fn(a + kGaussHi * h));
}

}  // namespace

FieldSpec FieldSpec::constant(double b) {
  FieldSpec f;
  f.preset = Preset::constant;
  f.b = b;
  return f;
}

FieldSpec FieldSpec::radial_dip(double b_inf, double depth, double width) {
  FieldSpec f;
  f.preset = Preset::radial_dip;
  f.b_inf = b_inf;
  f.depth = depth;
  f.width = width;
  return f;
}

FieldSpec FieldSpec::radial_bump(double b_inf, double height, double width) {
  FieldSpec f;
  f.preset = Preset::radial_bump;
  f.b_inf = b_inf;
  f.height = height;
  f.width = width;
  return f;
}

FieldSpec FieldSpec::transition(double b_minus, double b_plus, double width) {
  FieldSpec f;
  f.preset = Preset::transition;
  f.b_minus = b_minus;
  f.b_plus = b_plus;
  f.width = width;
  return f;
}

double FieldSpec::operator()(const Eigen::Vector2d& x) const {
  switch (preset) {
    case Preset::constant: return b;
    case Preset::radial_dip:
    case Preset::radial_bump:
      return b_inf + radial_amplitude(*this) * std::exp(-x.squaredNorm() / (width * width));
    case Preset::transition: return transition_profile(*this, x.y());
  }
  return b;
}

double FieldSpec::infimum() const {
  switch (preset) {
    case Preset::constant: return b;
    case Preset::radial_dip: return b_inf - depth;
    case Preset::radial_bump: return std::min(b_inf, b_inf + height);
    case Preset::transition: return std::min(b_minus, b_plus);
  }
  return b;
}

double FieldSpec::supremum() const {
  switch (preset) {
    case Preset::constant: return b;
    case Preset::radial_dip: return std::max(b_inf, b_inf - depth);
    case Preset::radial_bump: return b_inf + std::max(0.0, height);
    case Preset::transition: return std::max(b_minus, b_plus);
  }
  return b;
}

std::string FieldSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (preset) {
    case Preset::constant: os << "constant(b=" << b << ")"; break;
    case Preset::radial_dip:
      os << "radial_dip(b_inf=" << b_inf << ",depth=" << depth << ",width=" << width << ")";
      break;
    case Preset::radial_bump:
      os << "radial_bump(b_inf=" << b_inf << ",height=" << height << ",width=" << width << ")";
      break;
    case Preset::transition:
      os << "transition(b_minus=" << b_minus << ",b_plus=" << b_plus << ",width=" << width << ")";
      break;
  }
  return os.str();
}

ScalarField sample_field(const FieldSpec& spec, const Lattice& lattice) {
  if (spec.is_radial() || spec.preset == FieldSpec::Preset::transition) {
    if (!(spec.width > 0.0)) throw Error(ErrorCode::invalid_spec, "field width must be positive");
  }
  ScalarField out;
  out.values.resize(lattice.sites());
  for (Index s = 0; s < lattice.sites(); ++s) out.values(s) = spec(lattice.position(s));
  const auto& plaq = lattice.plaquettes();
  out.plaquette_values.resize(static_cast<Index>(plaq.size()));
  for (std::size_t k = 0; k < plaq.size(); ++k) {
    out.plaquette_values(static_cast<Index>(k)) = spec(lattice.plaquette_center(plaq[k]));
  }
  const double lo = std::min(out.values.minCoeff(),
                             out.plaquette_values.size() ? out.plaquette_values.minCoeff() : 1.0);
  if (!(lo > 0.0) || !out.values.allFinite()) {
    std::ostringstream os;
    os << "field " << spec.describe() << " has sample " << lo << " <= 0";
    throw Error(ErrorCode::positivity_violation, os.str());
  }
  return out;
}

std::optional<int> check_flux_quantization(const ScalarField& b, const Lattice& lattice) {
  if (!lattice.is_torus()) return std::nullopt;
  const double flux = b.plaquette_values.sum() * lattice.cell_area();
  const double chern = flux / kTwoPi;
  const double nearest = std::round(chern);
  if (std::abs(chern - nearest) > 1e-6 * std::max(1.0, std::abs(chern))) {
    std::ostringstream os;
    os.precision(12);
    os << "total flux " << flux << " gives F/(2 pi) = " << chern << ", off integer by "
       << chern - nearest;
    throw Error(ErrorCode::quantization, os.str());
  }
  return static_cast<int>(nearest);
}

Gauge default_gauge(const FieldSpec& spec, const Lattice& lattice) {
  if (lattice.is_torus() || spec.preset == FieldSpec::Preset::transition) return Gauge::landau;
  return Gauge::symmetric;
}

double EdgeIntegrals::value(const Lattice& lattice, Index site, Direction d) const {
  switch (d) {
    case Direction::plus_x: return along_x(site);
    case Direction::plus_y: return along_y(site);
    case Direction::minus_x: return -along_x(lattice.neighbor(site, Direction::minus_x));
    case Direction::minus_y: return -along_y(lattice.neighbor(site, Direction::minus_y));
  }
  return 0.0;
}

EdgeIntegrals edge_integrals(const FieldSpec& spec, const Lattice& lattice, Gauge gauge) {
  const Index n = lattice.sites();
  const double hx = lattice.hx();
  const double hy = lattice.hy();

  EdgeIntegrals out;
  out.along_x = VectorXd::Zero(n);
  out.along_y = VectorXd::Zero(n);
  out.periodic = lattice.is_torus();

  if (gauge == Gauge::landau) {
    if (spec.is_radial()) {
      throw Error(ErrorCode::unsupported_gauge, "landau gauge needs a field depending on x2 only");
    }
    // theta = x1 b(x2) dx2; horizontal edges vanish except on the torus seam.
    const int rows = lattice.rows();
    VectorXd column_flux(rows);  // \int_{y_r}^{y_r + hy} b
    for (int r = 0; r < rows; ++r) {
      const double y0 = lattice.position(lattice.site_at(0, r)).y();
      column_flux(r) = gauss_edge(y0, hy, [&](double y) { return transition_profile(spec, y); });
    }
    for (Index s = 0; s < n; ++s) {
      const int r = lattice.row(s);
      if (lattice.neighbor(s, Direction::plus_y) >= 0) {
        out.along_y(s) = lattice.position(s).x() * column_flux(r);
      }
      if (lattice.crosses_seam(s, Direction::plus_x)) {
        out.along_x(s) = -lattice.extent_x() * column_flux.head(r).sum();
      }
    }
    if (lattice.is_torus()) {
      out.total_flux = lattice.extent_x() * column_flux.sum();
      return out;
    }
  } else {
    if (lattice.is_torus()) {
      throw Error(ErrorCode::unsupported_gauge, "symmetric gauge is not periodic on the torus");
    }
    if (spec.preset == FieldSpec::Preset::transition) {
      throw Error(ErrorCode::unsupported_gauge, "symmetric gauge needs a radial or constant field");
    }
    for (Index s = 0; s < n; ++s) {
      const Eigen::Vector2d x = lattice.position(s);
      if (lattice.neighbor(s, Direction::plus_x) >= 0) {
        out.along_x(s) = gauss_edge(x.x(), hx, [&](double t) {
          return -x.y() * symmetric_profile(spec, t * t + x.y() * x.y());
        });
      }
      if (lattice.neighbor(s, Direction::plus_y) >= 0) {
        out.along_y(s) = gauss_edge(x.y(), hy, [&](double t) {
          return x.x() * symmetric_profile(spec, x.x() * x.x() + t * t);
        });
      }
    }
  }

  double flux = 0.0;
  for (Index s : lattice.plaquettes()) {
    const Index right = lattice.neighbor(s, Direction::plus_x);
    const Index up = lattice.neighbor(s, Direction::plus_y);
    flux += out.along_x(s) + out.along_y(right) - out.along_x(up) - out.along_y(s);
  }
  out.total_flux = flux;
  return out;
}

double GaugeLinks::phase(const Lattice& lattice, Index site, Direction d) const {
  switch (d) {
    case Direction::plus_x: return phase_x(site);
    case Direction::plus_y: return phase_y(site);
    case Direction::minus_x: return -phase_x(lattice.neighbor(site, Direction::minus_x));
    case Direction::minus_y: return -phase_y(lattice.neighbor(site, Direction::minus_y));
  }
  return 0.0;
}

Complex GaugeLinks::link(const Lattice& lattice, Index site, Direction d) const {
  return std::polar(1.0, phase(lattice, site, d));
}

GaugeLinks gauge_links(const EdgeIntegrals& ints, int p) {
  if (p < 1) throw Error(ErrorCode::invalid_input, "tensor power p must be >= 1");
  if (ints.periodic) {
    const double q = p * ints.total_flux / kTwoPi;
    if (std::abs(q - std::round(q)) > 1e-6 * std::max(1.0, std::abs(q))) {
      std::ostringstream os;
      os.precision(12);
      os << "p * flux / (2 pi) = " << q << " is not an integer; L^p does not exist on the torus";
      throw Error(ErrorCode::bundle_inconsistency, os.str());
    }
  }
  GaugeLinks out;
  out.p = p;
  out.phase_x = -static_cast<double>(p) * ints.along_x;
  out.phase_y = -static_cast<double>(p) * ints.along_y;
  return out;
}

VectorXd plaquette_holonomy(const GaugeLinks& links, const Lattice& lattice) {
  const auto& plaq = lattice.plaquettes();
  VectorXd out(static_cast<Index>(plaq.size()));
  for (std::size_t k = 0; k < plaq.size(); ++k) {
    const Index s = plaq[k];
    const Index right = lattice.neighbor(s, Direction::plus_x);
    const Index up = lattice.neighbor(s, Direction::plus_y);
    const double total =
        links.phase_x(s) + links.phase_y(right) - links.phase_x(up) - links.phase_y(s);
    out(static_cast<Index>(k)) = std::remainder(total, kTwoPi);
  }
  return out;
}

GaugeLinks apply_gauge_transform(const GaugeLinks& links, const Lattice& lattice,
                                 const VectorXcd& site_phases) {
  if (site_phases.size() != lattice.sites()) {
    throw Error(ErrorCode::invalid_input, "need one phase per site");
  }
  const VectorXd angle = site_phases.array().arg().matrix();
  GaugeLinks out = links;
  for (Index s = 0; s < lattice.sites(); ++s) {
    const Index right = lattice.neighbor(s, Direction::plus_x);
    const Index up = lattice.neighbor(s, Direction::plus_y);
    if (right >= 0) out.phase_x(s) += angle(s) - angle(right);
    if (up >= 0) out.phase_y(s) += angle(s) - angle(up);
  }
  return out;
}

PotentialSpec PotentialSpec::zero(int rank) {
  PotentialSpec v;
  v.kind = Kind::zero;
  v.rank = rank;
  return v;
}

PotentialSpec PotentialSpec::constant(const MatrixXcd& value) {
  PotentialSpec v;
  v.kind = Kind::constant;
  v.rank = static_cast<int>(value.rows());
  v.base = value;
  return v;
}

PotentialSpec PotentialSpec::radial_bump(double height, double width, int rank) {
  PotentialSpec v;
  v.kind = Kind::radial_bump;
  v.rank = rank;
  v.height = height;
  v.width = width;
  return v;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::zero: os << "zero(r=" << rank << ")"; break;
    case Kind::constant: os << "constant(r=" << rank << ")"; break;
    case Kind::radial_bump:
      os << "radial_bump(height=" << height << ",width=" << width << ",r=" << rank << ")";
      break;
    case Kind::per_site: os << "per_site(r=" << rank << ",n=" << per_site.size() << ")"; break;
  }
  if (base.size() > 0) {
    os << "[";
    for (Index i = 0; i < base.size(); ++i) os << base(i).real() << "," << base(i).imag() << ";";
    os << "]";
  }
  return os.str();
}

MatrixXd PotentialField::eigenvalues() const {
  MatrixXd out(rank, sites());
  for (Index s = 0; s < sites(); ++s) {
    if (rank == 1) {
      out(0, s) = values[static_cast<std::size_t>(s)](0, 0).real();
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(values[static_cast<std::size_t>(s)],
                                                  Eigen::EigenvaluesOnly);
      out.col(s) = es.eigenvalues();
    }
  }
  return out;
}

PotentialField sample_potential(const PotentialSpec& spec, const Lattice& lattice) {
  if (spec.rank < 1 || spec.rank > 8) {
    throw Error(ErrorCode::invalid_spec, "potential rank must lie in [1, 8]");
  }
  const int r = spec.rank;
  MatrixXcd base = MatrixXcd::Zero(r, r);
  if (spec.base.size() > 0) {
    if (spec.base.rows() != r || spec.base.cols() != r) {
      throw Error(ErrorCode::invalid_spec, "potential matrix must be rank x rank");
    }
    base = spec.base;
  }
  const double scale = std::max(1.0, base.cwiseAbs().maxCoeff());
  if ((base - base.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::invalid_spec, "potential matrix is not Hermitian");
  }
  base = 0.5 * (base + base.adjoint());

  PotentialField out;
  out.rank = r;
  out.values.resize(static_cast<std::size_t>(lattice.sites()));
  if (spec.kind == PotentialSpec::Kind::per_site) {
    if (static_cast<Index>(spec.per_site.size()) != lattice.sites()) {
      throw Error(ErrorCode::invalid_spec, "per-site potential does not match lattice size");
    }
  }
  if (spec.kind == PotentialSpec::Kind::radial_bump && !(spec.width > 0.0)) {
    throw Error(ErrorCode::invalid_spec, "potential width must be positive");
  }
  for (Index s = 0; s < lattice.sites(); ++s) {
    MatrixXcd v = base;
    switch (spec.kind) {
      case PotentialSpec::Kind::zero:
      case PotentialSpec::Kind::constant: break;
      case PotentialSpec::Kind::radial_bump: {
        const double g = std::exp(-lattice.position(s).squaredNorm() / (spec.width * spec.width));
        v.diagonal().array() += spec.height * g;
        break;
      }
      case PotentialSpec::Kind::per_site: {
        const MatrixXcd& m = spec.per_site[static_cast<std::size_t>(s)];
        if (m.rows() != r || m.cols() != r ||
            (m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
          throw Error(ErrorCode::invalid_spec, "per-site potential entry is not Hermitian r x r");
        }
        v += 0.5 * (m + m.adjoint());
        break;
      }
    }
    if (!v.allFinite()) throw Error(ErrorCode::invalid_spec, "potential is not finite");
    out.values[static_cast<std::size_t>(s)] = std::move(v);
  }
  return out;
}

PotentialSpec load_potential_file(const std::string& path, int rank) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open potential file " + path);
  PotentialSpec spec;
  spec.kind = PotentialSpec::Kind::per_site;
  spec.rank = rank;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    MatrixXcd m(rank, rank);
    for (int i = 0; i < rank; ++i) {
      for (int j = 0; j < rank; ++j) {
        double re = 0.0;
        double im = 0.0;
        if (!(ls >> re >> im)) {
          throw Error(ErrorCode::io, path + ":" + std::to_string(line_no) +
                                         ": expected " + std::to_string(2 * rank * rank) +
                                         " numbers");
        }
        m(i, j) = Complex(re, im);
      }
    }
    spec.per_site.push_back(std::move(m));
  }
  return spec;
}

}  // namespace bochner
