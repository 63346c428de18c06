#include "bochner/eigensolver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "bochner/io_detail.hpp"

namespace bochner {

namespace {

using ColSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

constexpr std::uint32_t kEigenVersion = 1;

double operator_scale(const SparseHermitian& h) {
  const SpectralBounds g = gershgorin_bounds(h);
  return std::max(std::abs(g.lower), std::abs(g.upper));
}

MatrixXcd random_block(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXcd out(rows, cols);
  // Column-major fill order keeps the stream layout independent of Eigen internals.
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(r, c) = Complex(re, im);
    }
  }
  return out;
}

// Orthonormal basis of span(w) projected off span(basis); drops directions
// already (numerically) contained in the basis.
MatrixXcd orthonormalize_against(const MatrixXcd& basis, MatrixXcd w) {
  if (w.cols() == 0) return w;
  const double reference = w.colwise().norm().maxCoeff();
  if (reference == 0.0) return MatrixXcd(w.rows(), 0);
  for (int pass = 0; pass < 2; ++pass) {
    if (basis.cols() > 0) w.noalias() -= basis * (basis.adjoint() * w);
  }
  Eigen::ColPivHouseholderQR<MatrixXcd> qr(w);
  const auto& r = qr.matrixQR();
  Index rank = 0;
  const Index diag = std::min(r.rows(), r.cols());
  while (rank < diag && std::abs(r(rank, rank)) > 1e-10 * reference) ++rank;
  if (rank == 0) return MatrixXcd(w.rows(), 0);
  MatrixXcd q = MatrixXcd::Identity(w.rows(), rank);
  q.applyOnTheLeft(qr.householderQ());
  if (basis.cols() > 0) {
    q.noalias() -= basis * (basis.adjoint() * q);
    Eigen::HouseholderQR<MatrixXcd> again(q);
    MatrixXcd q2 = MatrixXcd::Identity(w.rows(), rank);
    q2.applyOnTheLeft(again.householderQ());
    return q2;
  }
  return q;
}

MatrixXcd hcat(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(std::max(a.rows(), b.rows()), a.cols() + b.cols());
  if (a.cols() > 0) out.leftCols(a.cols()) = a;
  if (b.cols() > 0) out.rightCols(b.cols()) = b;
  return out;
}

enum class Decision { done, proceed, inject };

struct BlockIteration {
  std::function<MatrixXcd(const MatrixXcd&)> op;
  std::function<double(double)> score;  // on Ritz values of op; larger is wanted first
  std::function<Decision(const std::vector<EigenPair>&, const std::vector<double>&)> stop;
  Index block = 8;
  int depth = 4;
  double tol = 0.0;
  int max_cycles = 400;
  std::uint64_t seed = 1;
  bool rotate_with_h = false;  // re-diagonalize H on the kept Ritz block
};

struct IterationResult {
  std::vector<EigenPair> locked;
  bool finished = false;
};

// Restarted block Krylov iteration with locking. Ritz values come from the
// projected operator; the reported eigenvalues are Rayleigh quotients of H
// with recomputed residuals.
IterationResult run_block_iteration(const SparseHermitian& h, const BlockIteration& spec) {
  const Index n = h.dim();
  std::mt19937_64 rng(spec.seed);
  IterationResult result;
  MatrixXcd locked(n, 0);

  auto fresh = [&](Index cols, const MatrixXcd& against) {
    return orthonormalize_against(against, random_block(n, cols, rng));
  };

  MatrixXcd y = fresh(std::min(spec.block, n), locked);
  for (int cycle = 0; cycle < spec.max_cycles; ++cycle) {
    if (y.cols() == 0) break;
    std::vector<MatrixXcd> q_blocks{y};
    std::vector<MatrixXcd> p_blocks;
    MatrixXcd q_all = y;
    for (int j = 0; j <= spec.depth; ++j) {
      p_blocks.push_back(spec.op(q_blocks.back()));
      if (j == spec.depth || q_all.cols() + locked.cols() >= n) break;
      MatrixXcd next = orthonormalize_against(hcat(locked, q_all), p_blocks.back());
      const Index room = n - locked.cols() - q_all.cols();
      if (next.cols() > room) next.conservativeResize(Eigen::NoChange, room);
      if (next.cols() == 0) break;
      q_all = hcat(q_all, next);
      q_blocks.push_back(std::move(next));
    }
    MatrixXcd p_all(n, q_all.cols());
    Index col = 0;
    for (std::size_t b = 0; b < p_blocks.size(); ++b) {
      p_all.middleCols(col, p_blocks[b].cols()) = p_blocks[b];
      col += p_blocks[b].cols();
    }
    MatrixXcd t = q_all.adjoint() * p_all;
    t = (0.5 * (t + t.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(t);

    std::vector<Index> order(static_cast<std::size_t>(t.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return spec.score(es.eigenvalues()(a)) > spec.score(es.eigenvalues()(b));
    });
    const Index take = std::min<Index>(spec.block, t.rows());
    MatrixXcd coeffs(t.rows(), take);
    for (Index k = 0; k < take; ++k) coeffs.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    MatrixXcd ritz = q_all * coeffs;
    if (spec.rotate_with_h) {
      // Folded operators pair up sigma +/- delta; H separates them.
      MatrixXcd g = ritz.adjoint() * (h.matrix * ritz);
      g = (0.5 * (g + g.adjoint())).eval();
      Eigen::SelfAdjointEigenSolver<MatrixXcd> gs(g);
      ritz = (ritz * gs.eigenvectors()).eval();
    }
    ritz.colwise().normalize();
    const MatrixXcd hr = h.matrix * ritz;

    std::vector<Index> pending_cols;
    std::vector<double> pending_values;
    for (Index k = 0; k < take; ++k) {
      const double lambda = ritz.col(k).dot(hr.col(k)).real();
      const double res = (hr.col(k) - lambda * ritz.col(k)).norm();
      if (res <= spec.tol) {
        result.locked.push_back({lambda, ritz.col(k), res});
        locked = hcat(locked, ritz.col(k));
      } else {
        pending_cols.push_back(k);
        pending_values.push_back(lambda);
      }
    }

    const Decision decision = spec.stop(result.locked, pending_values);
    if (decision == Decision::done) {
      result.finished = true;
      return result;
    }
    if (locked.cols() >= n) break;

    y.resize(n, static_cast<Index>(pending_cols.size()));
    for (std::size_t k = 0; k < pending_cols.size(); ++k) y.col(static_cast<Index>(k)) = ritz.col(pending_cols[k]);
    // Fresh directions keep exact degeneracies reachable.
    const Index target = std::min(spec.block, n - locked.cols());
    const Index extra = decision == Decision::inject ? std::max<Index>(2, target / 4) : 0;
    if (y.cols() + extra > target) y.conservativeResize(Eigen::NoChange, std::max<Index>(0, target - extra));
    if (y.cols() < target) {
      y = hcat(y, fresh(target - y.cols(), hcat(locked, y)));
    }
  }
  return result;
}

std::vector<EigenPair> sorted(std::vector<EigenPair> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
  return pairs;
}

void require_hermitian(const SparseHermitian& h, const char* who) {
  if (!h.hermitian) throw Error(ErrorCode::flag, std::string(who) + " needs a Hermitian operator");
}

}  // namespace

VectorXd SpectrumSlice::eigenvalues() const {
  VectorXd out(size());
  for (Index i = 0; i < size(); ++i) out(i) = pairs[static_cast<std::size_t>(i)].lambda;
  return out;
}

double default_tolerance(const SparseHermitian& h) {
  return 1e-8 * std::max(1.0, operator_scale(h));
}

struct ShiftedFactorization::Impl {
  Eigen::SimplicialLDLT<ColSparse, Eigen::Lower> ldlt;
};

ShiftedFactorization::ShiftedFactorization(const SparseHermitian& h, double shift)
    : impl_(std::make_unique<Impl>()), shift_(shift) {
  const Index n = h.dim();
  ColSparse a = h.matrix;
  ColSparse id(n, n);
  id.setIdentity();
  a = a - Complex(shift) * id;
  a.makeCompressed();
  impl_->ldlt.compute(a);
  const double scale = std::max(1.0, operator_scale(h) + std::abs(shift));
  if (impl_->ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::factorization, "LDL^* factorization failed");
  }
  const auto d = impl_->ldlt.vectorD();
  for (Index i = 0; i < d.size(); ++i) {
    const double di = d(i).real();
    if (!std::isfinite(di) || std::abs(di) <= 1e-14 * scale) {
      throw Error(ErrorCode::factorization, "zero pivot in LDL^* at shift " + std::to_string(shift));
    }
    if (di < 0.0) ++negatives_;
  }
  // Unpivoted LDL^* of an indefinite matrix can lose accuracy; probe it.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  const MatrixXcd probe = random_block(n, 1, rng);
  const MatrixXcd x = impl_->ldlt.solve(probe);
  const double err = (a * x - probe).norm() / probe.norm();
  if (!(err < 1e-6)) {
    throw Error(ErrorCode::factorization, "unstable LDL^* at shift " + std::to_string(shift));
  }
}

ShiftedFactorization::~ShiftedFactorization() = default;
ShiftedFactorization::ShiftedFactorization(ShiftedFactorization&&) noexcept = default;
ShiftedFactorization& ShiftedFactorization::operator=(ShiftedFactorization&&) noexcept = default;

MatrixXcd ShiftedFactorization::solve(const MatrixXcd& rhs) const { return impl_->ldlt.solve(rhs); }

Index inertia_count(const SparseHermitian& h, double shift) {
  const double nudge = 1e-12 * std::max(1.0, operator_scale(h));
  for (int attempt = 0; attempt < 4; ++attempt) {
    try {
      return ShiftedFactorization(h, shift + attempt * nudge).negative_count();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::factorization || attempt == 3) throw;
    }
  }
  return 0;
}

void polish_pairs(const SparseHermitian& h, SpectrumSlice& slice, int steps) {
  if (slice.pairs.empty() || steps <= 0) return;
  const double scale = std::max(1.0, operator_scale(h));
  const Index n = h.dim();
  const Index k = slice.size();
  MatrixXcd v(n, k);
  for (Index j = 0; j < k; ++j) {
    const EigenPair& pr = slice.pairs[static_cast<std::size_t>(j)];
    VectorXcd x = pr.vector;
    double offset = 1e-9 * scale;
    for (int attempt = 0;; ++attempt) {
      try {
        const ShiftedFactorization f(h, pr.lambda + offset);
        for (int s = 0; s < steps; ++s) {
          x = f.solve(x);
          x.normalize();
        }
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::factorization || attempt == 3) throw;
        offset *= 10.0;
      }
    }
    v.col(j) = x;
  }
  const Eigen::HouseholderQR<MatrixXcd> qr(v);
  const MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(n, k);
  MatrixXcd t = q.adjoint() * (h.matrix * q);
  t = (0.5 * (t + t.adjoint())).eval();
  const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(t);
  const MatrixXcd ritz = q * es.eigenvectors();
  for (Index j = 0; j < k; ++j) {
    EigenPair& pr = slice.pairs[static_cast<std::size_t>(j)];
    pr.vector = ritz.col(j).normalized();
    pr.lambda = es.eigenvalues()(j);
    pr.residual = residual_norm(h, pr.vector, pr.lambda);
  }
}

double residual_norm(const SparseHermitian& h, const VectorXcd& u, double lambda) {
  return (h.matrix * u - lambda * u).norm();
}

double orthogonality_defect(const SpectrumSlice& slice) {
  if (slice.pairs.empty()) return 0.0;
  MatrixXcd v(slice.pairs.front().vector.size(), slice.size());
  for (Index i = 0; i < slice.size(); ++i) v.col(i) = slice.pairs[static_cast<std::size_t>(i)].vector;
  const MatrixXcd g = v.adjoint() * v - MatrixXcd::Identity(slice.size(), slice.size());
  return g.cwiseAbs().maxCoeff();
}

SpectrumSlice dense_spectrum(const SparseHermitian& h) {
  require_hermitian(h, "dense_spectrum");
  if (h.dim() > 4096) throw Error(ErrorCode::size, "dense_spectrum is limited to N <= 4096");
  const MatrixXcd dense = MatrixXcd(h.matrix);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(dense);
  SpectrumSlice out;
  out.requested = h.dim();
  out.certificate = Certificate::certified;
  out.tol = default_tolerance(h);
  out.pairs.reserve(static_cast<std::size_t>(h.dim()));
  for (Index i = 0; i < h.dim(); ++i) {
    const double lambda = es.eigenvalues()(i);
    const VectorXcd v = es.eigenvectors().col(i);
    out.pairs.push_back({lambda, v, residual_norm(h, v, lambda)});
  }
  return out;
}

VectorXd dense_eigenvalues(const SparseHermitian& h) {
  require_hermitian(h, "dense_eigenvalues");
  if (h.dim() > 4096) throw Error(ErrorCode::size, "dense oracle is limited to N <= 4096");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(h.matrix), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

SpectrumSlice lowest_eigs(const SparseHermitian& h, Index m, double tol,
                          const SolverOptions& options) {
  require_hermitian(h, "lowest_eigs");
  if (m < 1 || m >= h.dim()) throw Error(ErrorCode::invalid_input, "need 1 <= m < N");
  if (tol <= 0.0) tol = options.tol > 0.0 ? options.tol : default_tolerance(h);

  const double scale = std::max(1.0, operator_scale(h));
  const double lower = gershgorin_bounds(h).lower;
  const double sigma = lower - 1e-3 * std::max(1.0, std::abs(lower));
  ShiftedFactorization factor(h, sigma);

  const double eta = std::max(2.0 * tol, 1e-10 * scale);
  bool certified = false;
  int misses = 0;

  BlockIteration spec;
  spec.op = [&](const MatrixXcd& x) { return factor.solve(x); };
  spec.score = [](double theta) { return theta; };
  spec.block = std::min<Index>(h.dim(), m + std::max<Index>(10, m));
  spec.depth = options.krylov_depth;
  spec.tol = tol;
  spec.max_cycles = options.max_cycles;
  spec.seed = options.seed;
  spec.stop = [&](const std::vector<EigenPair>& locked, const std::vector<double>& pending) {
    if (static_cast<Index>(locked.size()) < m) return Decision::proceed;
    std::vector<double> values;
    for (const auto& pr : locked) values.push_back(pr.lambda);
    std::sort(values.begin(), values.end());
    const double lambda_m = values[static_cast<std::size_t>(m - 1)];
    for (double v : pending) {
      if (v < lambda_m) return Decision::proceed;
    }
    const double cut = lambda_m + eta;
    const Index found = std::count_if(values.begin(), values.end(), [&](double v) { return v < cut; });
    const Index count = inertia_count(h, cut);
    if (count == found) {
      certified = true;
      return Decision::done;
    }
    if (count < found || ++misses > 8) return Decision::done;
    return Decision::inject;
  };

  IterationResult res = run_block_iteration(h, spec);
  SpectrumSlice out;
  out.requested = m;
  out.tol = tol;
  out.pairs = sorted(std::move(res.locked));
  if (static_cast<Index>(out.pairs.size()) > m) out.pairs.resize(static_cast<std::size_t>(m));
  out.certificate = certified ? Certificate::certified : Certificate::heuristic;
  if (!res.finished || static_cast<Index>(out.pairs.size()) < m) {
    std::ostringstream os;
    os << "lowest_eigs converged " << out.pairs.size() << " of " << m << " pairs";
    throw ConvergenceError(os.str(), std::move(out));
  }
  polish_pairs(h, out, options.polish_steps);
  return out;
}

namespace {

SpectrumSlice window_single(const SparseHermitian& h, double alpha, double beta, Index expected,
                            double tol, const SolverOptions& options) {
  SpectrumSlice out;
  out.window = {alpha, beta};
  out.requested = expected;
  out.tol = tol;
  if (expected == 0) {
    out.certificate = Certificate::certified;
    return out;
  }
  double sigma = 0.5 * (alpha + beta);
  std::unique_ptr<ShiftedFactorization> factor;
  for (int attempt = 0;; ++attempt) {
    try {
      factor = std::make_unique<ShiftedFactorization>(h, sigma);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::factorization || attempt == 3) throw;
      sigma += 1e-3 * (beta - alpha);
    }
  }

  auto inside = [&](double v) { return v >= alpha && v < beta; };
  BlockIteration spec;
  spec.op = [&](const MatrixXcd& x) { return factor->solve(x); };
  spec.score = [](double theta) { return std::abs(theta); };
  spec.block = std::min<Index>(h.dim(), expected + std::max<Index>(8, expected / 2));
  spec.depth = options.krylov_depth;
  spec.tol = tol;
  spec.max_cycles = options.max_cycles;
  spec.seed = options.seed ^ std::bit_cast<std::uint64_t>(alpha);
  spec.stop = [&](const std::vector<EigenPair>& locked, const std::vector<double>&) {
    const auto found = std::count_if(locked.begin(), locked.end(),
                                     [&](const EigenPair& pr) { return inside(pr.lambda); });
    return found >= expected ? Decision::done : Decision::proceed;
  };

  IterationResult res = run_block_iteration(h, spec);
  for (auto& pr : res.locked) {
    if (inside(pr.lambda)) out.pairs.push_back(std::move(pr));
  }
  out.pairs = sorted(std::move(out.pairs));
  out.certificate = static_cast<Index>(out.pairs.size()) == expected ? Certificate::certified
                                                                     : Certificate::heuristic;
  if (!res.finished) {
    std::ostringstream os;
    os << "window_eigs found " << out.pairs.size() << " of " << expected << " pairs in ["
       << alpha << ", " << beta << ")";
    throw ConvergenceError(os.str(), std::move(out));
  }
  return out;
}

SpectrumSlice window_recursive(const SparseHermitian& h, double alpha, double beta, Index below_alpha,
                               Index below_beta, double tol, const SolverOptions& options, int depth) {
  const Index expected = below_beta - below_alpha;
  if (expected <= options.max_per_slice || depth > 40) {
    return window_single(h, alpha, beta, expected, tol, options);
  }
  const double mid = 0.5 * (alpha + beta);
  const Index below_mid = inertia_count(h, mid);
  SpectrumSlice lo = window_recursive(h, alpha, mid, below_alpha, below_mid, tol, options, depth + 1);
  SpectrumSlice hi = window_recursive(h, mid, beta, below_mid, below_beta, tol, options, depth + 1);
  SpectrumSlice out;
  out.window = {alpha, beta};
  out.requested = expected;
  out.tol = tol;
  out.pairs = std::move(lo.pairs);
  for (auto& pr : hi.pairs) out.pairs.push_back(std::move(pr));
  out.certificate = (lo.certificate == Certificate::certified && hi.certificate == Certificate::certified)
                        ? Certificate::certified
                        : Certificate::heuristic;
  return out;
}

}  // namespace

SpectrumSlice window_eigs(const SparseHermitian& h, double alpha, double beta, double tol,
                          const SolverOptions& options) {
  require_hermitian(h, "window_eigs");
  if (!(alpha < beta)) throw Error(ErrorCode::invalid_window, "window_eigs needs alpha < beta");
  if (tol <= 0.0) tol = options.tol > 0.0 ? options.tol : default_tolerance(h);
  const Index below_alpha = inertia_count(h, alpha);
  const Index below_beta = inertia_count(h, beta);
  SpectrumSlice out = window_recursive(h, alpha, beta, below_alpha, below_beta, tol, options, 0);
  polish_pairs(h, out, options.polish_steps);
  return out;
}

SpectrumSlice window_eigs_folded(const SparseHermitian& h, double alpha, double beta,
                                 Index max_pairs, double tol, const SolverOptions& options) {
  require_hermitian(h, "window_eigs_folded");
  if (!(alpha < beta)) throw Error(ErrorCode::invalid_window, "window_eigs needs alpha < beta");
  if (tol <= 0.0) tol = options.tol > 0.0 ? options.tol : default_tolerance(h);
  const double sigma = 0.5 * (alpha + beta);
  const double half = 0.5 * (beta - alpha);
  const SpectralBounds g = gershgorin_bounds(h);
  const double top = std::pow(std::max(std::abs(g.lower - sigma), std::abs(g.upper - sigma)), 2);

  auto inside = [&](double v) { return v >= alpha && v < beta; };
  BlockIteration spec;
  spec.op = [&](const MatrixXcd& x) {
    const MatrixXcd y = h.matrix * x - sigma * x;
    return MatrixXcd(top * x - (h.matrix * y - sigma * y));
  };
  spec.score = [](double theta) { return theta; };
  spec.block = std::min<Index>(h.dim(), max_pairs + std::max<Index>(8, max_pairs / 2));
  spec.depth = std::max(options.krylov_depth, 8);
  spec.rotate_with_h = true;
  spec.tol = tol;
  spec.max_cycles = options.max_cycles;
  spec.seed = options.seed;
  spec.stop = [&](const std::vector<EigenPair>& locked, const std::vector<double>& pending) {
    const auto found = std::count_if(locked.begin(), locked.end(),
                                     [&](const EigenPair& pr) { return inside(pr.lambda); });
    if (found >= max_pairs) return Decision::done;
    // Pairs lock roughly in order of distance from sigma; once one outside the
    // window has locked, stop when no unconverged candidate is still inside.
    const bool passed = std::any_of(locked.begin(), locked.end(),
                                    [&](const EigenPair& pr) { return std::abs(pr.lambda - sigma) > half; });
    if (!passed) return Decision::proceed;
    const bool candidates = std::any_of(pending.begin(), pending.end(),
                                        [&](double v) { return std::abs(v - sigma) <= half + tol; });
    return candidates ? Decision::proceed : Decision::done;
  };
  IterationResult res = run_block_iteration(h, spec);
  SpectrumSlice out;
  out.window = {alpha, beta};
  out.requested = max_pairs;
  out.tol = tol;
  out.certificate = Certificate::heuristic;
  for (auto& pr : res.locked) {
    if (inside(pr.lambda)) out.pairs.push_back(std::move(pr));
  }
  out.pairs = sorted(std::move(out.pairs));
  if (!res.finished) throw ConvergenceError("folded-spectrum iteration did not settle", std::move(out));
  return out;
}

void write_eigenvectors(const std::string& path, const SpectrumSlice& slice) {
  static_assert(std::endian::native == std::endian::little, "binary dumps assume little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  const std::uint64_t n = slice.pairs.empty() ? 0 : static_cast<std::uint64_t>(slice.pairs.front().vector.size());
  out.write("BSEV", 4);
  detail::write_pod(out, kEigenVersion);
  detail::write_pod(out, n);
  detail::write_pod(out, static_cast<std::uint64_t>(slice.pairs.size()));
  for (const EigenPair& pr : slice.pairs) {
    detail::write_pod(out, pr.lambda);
    detail::write_pod(out, pr.residual);
    for (Index i = 0; i < pr.vector.size(); ++i) {
      detail::write_pod(out, pr.vector(i).real());
      detail::write_pod(out, pr.vector(i).imag());
    }
  }
  if (!out) throw Error(ErrorCode::io, "short write to " + path);
}

SpectrumSlice read_eigenvectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "BSEV", 4) != 0) throw Error(ErrorCode::io, path + ": bad magic");
  if (detail::read_pod<std::uint32_t>(in) != kEigenVersion) {
    throw Error(ErrorCode::io, path + ": unsupported version");
  }
  const auto n = detail::read_pod<std::uint64_t>(in);
  const auto count = detail::read_pod<std::uint64_t>(in);
  SpectrumSlice out;
  out.requested = static_cast<Index>(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    EigenPair pr;
    pr.lambda = detail::read_pod<double>(in);
    pr.residual = detail::read_pod<double>(in);
    pr.vector.resize(static_cast<Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
      const double re = detail::read_pod<double>(in);
      const double im = detail::read_pod<double>(in);
      pr.vector(static_cast<Index>(i)) = Complex(re, im);
    }
    out.pairs.push_back(std::move(pr));
  }
  return out;
}

}  // namespace bochner
