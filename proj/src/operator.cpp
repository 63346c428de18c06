#include "bochner/operator.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "bochner/error.hpp"
#include "bochner/io_detail.hpp"

namespace bochner {

namespace {

constexpr std::uint32_t kOperatorVersion = 1;
constexpr std::uint32_t kFlagHermitian = 1u;

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

template <typename F>
SparseHermitian scale_offdiagonal(const SparseHermitian& h, const WeightField& w, F&& factor) {
  const Index r = h.meta.rank;
  SparseHermitian out = h;
  for (Index row = 0; row < out.matrix.outerSize(); ++row) {
    for (SparseMatrix::InnerIterator it(out.matrix, row); it; ++it) {
      const double dphi = w.values(row / r) - w.values(it.col() / r);
      it.valueRef() *= factor(dphi, row == it.col());
    }
  }
  return out;
}

void check_weight(const SparseHermitian& h, const WeightField& w) {
  if (w.values.size() * h.meta.rank != h.dim()) {
    throw Error(ErrorCode::consistency, "weight field does not match operator dimension");
  }
}

}  // namespace

std::uint64_t provenance_hash(const std::string& text) { return fnv1a(text.data(), text.size()); }

SparseHermitian assemble_H(const Lattice& lattice, const GaugeLinks& links,
                           const PotentialField& potential, int p) {
  if (links.p != p) {
    throw Error(ErrorCode::consistency, "gauge links were built for p = " +
                                            std::to_string(links.p) + ", not " +
                                            std::to_string(p));
  }
  if (potential.sites() != lattice.sites() || links.phase_x.size() != lattice.sites()) {
    throw Error(ErrorCode::consistency, "lattice, links and potential sizes disagree");
  }
  const Index r = potential.rank;
  const Index n = lattice.sites() * r;
  const double wx = 1.0 / (p * lattice.hx() * lattice.hx());
  const double wy = 1.0 / (p * lattice.hy() * lattice.hy());
  const double diag = 2.0 * (wx + wy);

  std::vector<Eigen::Triplet<Complex, std::int64_t>> triplets;
  triplets.reserve(static_cast<std::size_t>(n * (4 + r)));
  for (Index s = 0; s < lattice.sites(); ++s) {
    const MatrixXcd& v = potential.values[static_cast<std::size_t>(s)];
    for (Index a = 0; a < r; ++a) {
      for (Index b = 0; b < r; ++b) {
        Complex value = v(a, b);
        if (a == b) value = Complex(diag + value.real(), 0.0);
        if (value != Complex(0.0) || a == b) triplets.emplace_back(s * r + a, s * r + b, value);
      }
    }
    for (Direction d : kAllDirections) {
      const Index t = lattice.neighbor(s, d);
      if (t < 0) continue;
      const double weight = (d == Direction::plus_x || d == Direction::minus_x) ? wx : wy;
      const Complex u = -weight * links.link(lattice, s, d);
      for (Index a = 0; a < r; ++a) triplets.emplace_back(s * r + a, t * r + a, u);
    }
  }

  SparseHermitian out;
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.matrix.makeCompressed();
  out.hermitian = true;
  out.meta.p = p;
  out.meta.hx = lattice.hx();
  out.meta.hy = lattice.hy();
  out.meta.rank = static_cast<int>(r);

  std::uint64_t hash = fnv1a(links.phase_x.data(), sizeof(double) * links.phase_x.size());
  hash = fnv1a(links.phase_y.data(), sizeof(double) * links.phase_y.size(), hash);
  for (const MatrixXcd& m : potential.values) hash = fnv1a(m.data(), sizeof(Complex) * m.size(), hash);
  out.meta.provenance = hash;
  return out;
}

SparseHermitian conjugate_H(const SparseHermitian& h, const WeightField& w, double tau, int p) {
  check_weight(h, w);
  if (!std::isfinite(tau)) throw Error(ErrorCode::invalid_input, "tau must be finite");
  if (tau == 0.0) return h;

  const double scale = tau * std::sqrt(static_cast<double>(p));
  const Index r = h.meta.rank;
  double worst = 0.0;
  for (Index row = 0; row < h.matrix.outerSize(); ++row) {
    for (SparseMatrix::InnerIterator it(h.matrix, row); it; ++it) {
      worst = std::max(worst, std::abs(scale * (w.values(row / r) - w.values(it.col() / r))));
    }
  }
  if (worst > 30.0) {
    throw Error(ErrorCode::overflow, "tau sqrt(p) |dPhi| reaches " + std::to_string(worst) +
                                         " > 30; reduce tau or rescale the weight");
  }
  SparseHermitian out =
      scale_offdiagonal(h, w, [scale](double dphi, bool) { return std::exp(scale * dphi); });
  out.hermitian = false;
  return out;
}

TaylorTerms taylor_terms(const SparseHermitian& h, const WeightField& w, int p) {
  check_weight(h, w);
  TaylorTerms out;
  out.first = scale_offdiagonal(h, w, [p](double dphi, bool diag) {
    return diag ? 0.0 : p * dphi;
  });
  out.second = scale_offdiagonal(h, w, [p](double dphi, bool diag) {
    return diag ? 0.0 : 0.5 * p * dphi * dphi;
  });
  out.first.matrix.prune(Complex(0.0));
  out.second.matrix.prune(Complex(0.0));
  out.first.hermitian = false;
  // B_p inherits Hermiticity from H since (dPhi)^2 is symmetric.
  out.second.hermitian = h.hermitian;
  return out;
}

double hermiticity_defect(const SparseHermitian& h) {
  const SparseMatrix adj = h.matrix.adjoint();
  const SparseMatrix diff = h.matrix - adj;
  double worst = 0.0;
  for (Index k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst;
}

SpectralBounds gershgorin_bounds(const SparseHermitian& h) {
  SpectralBounds out{std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
  for (Index row = 0; row < h.matrix.outerSize(); ++row) {
    double center = 0.0;
    double radius = 0.0;
    for (SparseMatrix::InnerIterator it(h.matrix, row); it; ++it) {
      if (it.col() == row) {
        center = it.value().real();
      } else {
        radius += std::abs(it.value());
      }
    }
    out.lower = std::min(out.lower, center - radius);
    out.upper = std::max(out.upper, center + radius);
  }
  return out;
}

void write_operator(const std::string& path, const SparseHermitian& h) {
  static_assert(std::endian::native == std::endian::little, "binary dumps assume little-endian");
  SparseMatrix m = h.matrix;
  m.makeCompressed();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  const auto n = static_cast<std::uint64_t>(m.rows());
  const auto nnz = static_cast<std::uint64_t>(m.nonZeros());
  out.write("BSHP", 4);
  detail::write_pod(out, kOperatorVersion);
  detail::write_pod(out, n);
  detail::write_pod(out, nnz);
  detail::write_pod(out, h.hermitian ? kFlagHermitian : 0u);
  for (Index i = 0; i <= m.rows(); ++i) {
    detail::write_pod(out, static_cast<std::uint64_t>(m.outerIndexPtr()[i]));
  }
  for (Index k = 0; k < m.nonZeros(); ++k) {
    detail::write_pod(out, static_cast<std::uint64_t>(m.innerIndexPtr()[k]));
  }
  for (Index k = 0; k < m.nonZeros(); ++k) {
    detail::write_pod(out, m.valuePtr()[k].real());
    detail::write_pod(out, m.valuePtr()[k].imag());
  }
  if (!out) throw Error(ErrorCode::io, "short write to " + path);
}

SparseHermitian read_operator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "BSHP", 4) != 0) throw Error(ErrorCode::io, path + ": bad magic");
  const auto version = detail::read_pod<std::uint32_t>(in);
  if (version != kOperatorVersion) throw Error(ErrorCode::io, path + ": unsupported version");
  const auto n = detail::read_pod<std::uint64_t>(in);
  const auto nnz = detail::read_pod<std::uint64_t>(in);
  const auto flags = detail::read_pod<std::uint32_t>(in);

  SparseHermitian h;
  h.hermitian = (flags & kFlagHermitian) != 0;
  h.matrix.resize(static_cast<Index>(n), static_cast<Index>(n));
  h.matrix.resizeNonZeros(static_cast<Index>(nnz));
  for (std::uint64_t i = 0; i <= n; ++i) {
    h.matrix.outerIndexPtr()[i] = static_cast<std::int64_t>(detail::read_pod<std::uint64_t>(in));
  }
  for (std::uint64_t k = 0; k < nnz; ++k) {
    h.matrix.innerIndexPtr()[k] = static_cast<std::int64_t>(detail::read_pod<std::uint64_t>(in));
  }
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const double re = detail::read_pod<double>(in);
    const double im = detail::read_pod<double>(in);
    h.matrix.valuePtr()[k] = Complex(re, im);
  }
  if (!in) throw Error(ErrorCode::io, path + ": truncated");
  return h;
}

}  // namespace bochner
