#pragma once

#include <cstdint>
#include <string>

#include <Eigen/SparseCore>

#include "bochner/lattice.hpp"
#include "bochner/magnetic.hpp"
#include "bochner/types.hpp"

namespace bochner {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, std::int64_t>;

struct OperatorMeta {
  int p = 1;
  double hx = 0.0;
  double hy = 0.0;
  int rank = 1;
  std::uint64_t provenance = 0;
};

/// Sparse discretization of H_p (or of a derived, possibly non-Hermitian
/// operator sharing its sparsity). Unknown (site s, component a) sits at
/// row s * rank + a.
struct SparseHermitian {
  SparseMatrix matrix;
  bool hermitian = true;
  OperatorMeta meta;

  Index dim() const { return matrix.rows(); }
  Index nonzeros() const { return matrix.nonZeros(); }
};

/// H_p = (1/p) Delta + V with the magnetic 5-point stencil; Dirichlet
/// neighbours of a rectangle contribute only to the diagonal.
SparseHermitian assemble_H(const Lattice& lattice, const GaugeLinks& links,
                           const PotentialField& potential, int p);

/// Diagonal similarity e^{tau sqrt(p) Phi} H e^{-tau sqrt(p) Phi}.
SparseHermitian conjugate_H(const SparseHermitian& h, const WeightField& w, double tau, int p);

/// First and second tau-derivatives of conjugate_H at tau = 0, scaled so that
/// H_tau = H + (tau/sqrt p) A + tau^2 B + O(tau^3).
struct TaylorTerms {
  SparseHermitian first;   // A_p
  SparseHermitian second;  // B_p
};

TaylorTerms taylor_terms(const SparseHermitian& h, const WeightField& w, int p);

/// max |H - H^*| entrywise.
double hermiticity_defect(const SparseHermitian& h);

/// Gershgorin enclosure of the spectrum, real parts only.
struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;
};
SpectralBounds gershgorin_bounds(const SparseHermitian& h);

std::uint64_t provenance_hash(const std::string& text);

/// Binary dump, little-endian: "BSHP", u32 version, u64 N, u64 nnz, u32 flags,
/// u64 row offsets[N+1], u64 columns[nnz], f64 (re, im)[nnz].
void write_operator(const std::string& path, const SparseHermitian& h);
SparseHermitian read_operator(const std::string& path);

}  // namespace bochner
