#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bochner/error.hpp"
#include "bochner/operator.hpp"
#include "bochner/types.hpp"

namespace bochner {

struct EigenPair {
  double lambda = 0.0;
  VectorXcd vector;       // unit 2-norm
  double residual = 0.0;  // ||H u - lambda u||_2, recomputed
};

enum class Certificate { certified, heuristic };

struct SpectrumSlice {
  std::vector<EigenPair> pairs;  // ascending in lambda
  std::optional<std::pair<double, double>> window;
  Index requested = 0;
  Certificate certificate = Certificate::heuristic;
  double tol = 0.0;

  Index size() const { return static_cast<Index>(pairs.size()); }
  VectorXd eigenvalues() const;
};

/// Non-convergence; carries whatever pairs did converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, SpectrumSlice partial)
      : Error(ErrorCode::convergence, what), partial_(std::move(partial)) {}
  const SpectrumSlice& partial() const { return partial_; }

 private:
  SpectrumSlice partial_;
};

struct SolverOptions {
  double tol = 0.0;          // <= 0 selects default_tolerance(H)
  int max_cycles = 400;
  int krylov_depth = 3;      // block Krylov steps per restart
  Index max_per_slice = 48;  // window_eigs splits wider windows
  std::uint64_t seed = 0x5eedf00dULL;
  int polish_steps = 0;      // inverse-iteration sweeps after convergence
};

/// 1e-8 * max(1, Gershgorin norm of H).
double default_tolerance(const SparseHermitian& h);

/// LDL^* factorization of H - shift; exposes the inertia and a block solve.
class ShiftedFactorization {
 public:
  ShiftedFactorization(const SparseHermitian& h, double shift);
  ~ShiftedFactorization();
  ShiftedFactorization(ShiftedFactorization&&) noexcept;
  ShiftedFactorization& operator=(ShiftedFactorization&&) noexcept;

  double shift() const { return shift_; }
  /// Number of eigenvalues of H strictly below the shift.
  Index negative_count() const { return negatives_; }
  MatrixXcd solve(const MatrixXcd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double shift_ = 0.0;
  Index negatives_ = 0;
};

/// Eigenvalue count below `shift`, jittering on breakdown.
Index inertia_count(const SparseHermitian& h, double shift);

SpectrumSlice dense_spectrum(const SparseHermitian& h);
/// Eigenvalues only; the cheap route for oracles on larger instances.
VectorXd dense_eigenvalues(const SparseHermitian& h);

SpectrumSlice lowest_eigs(const SparseHermitian& h, Index m, double tol = 0.0,
                          const SolverOptions& options = {});

/// All eigenpairs in [alpha, beta) by shift-invert at the midpoint.
SpectrumSlice window_eigs(const SparseHermitian& h, double alpha, double beta, double tol = 0.0,
                          const SolverOptions& options = {});

/// Fallback without factorization: block iteration on the folded operator
/// (H - sigma)^2. Always heuristic.
SpectrumSlice window_eigs_folded(const SparseHermitian& h, double alpha, double beta,
                                 Index max_pairs, double tol = 0.0,
                                 const SolverOptions& options = {});

/// Sharpens converged pairs well below the locking tolerance: a few steps of
/// inverse iteration at a shift next to each eigenvalue, then Rayleigh-Ritz
/// on the span of the polished vectors.
void polish_pairs(const SparseHermitian& h, SpectrumSlice& slice, int steps);

double residual_norm(const SparseHermitian& h, const VectorXcd& u, double lambda);

/// max |G - I| for the Gram matrix of the slice's vectors.
double orthogonality_defect(const SpectrumSlice& slice);

/// Binary dump, little-endian: "BSEV", u32 version, u64 N, u64 count, then
/// per pair f64 lambda, f64 residual, N (re, im) f64 pairs.
void write_eigenvectors(const std::string& path, const SpectrumSlice& slice);
SpectrumSlice read_eigenvectors(const std::string& path);

}  // namespace bochner
