#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "bochner/types.hpp"

namespace bochner {

enum class LatticeKind { torus, rectangle_dirichlet };

enum class Direction { plus_x = 0, plus_y = 1, minus_x = 2, minus_y = 3 };

constexpr std::array<Direction, 4> kAllDirections = {Direction::plus_x, Direction::plus_y,
                                                     Direction::minus_x, Direction::minus_y};

struct LatticeSpec {
  LatticeKind kind = LatticeKind::torus;
  double extent_x = 1.0;
  double extent_y = 1.0;
  int nx = 2;
  int ny = 2;
};

/// Uniform grid discretization of a flat 2D base.
///
/// Torus: nx*ny sites at (ix*hx, iy*hy), ix in [0, nx), every edge wraps.
/// Rectangle: the (nx-1)*(ny-1) interior points of the grid on
/// [-Lx/2, Lx/2] x [-Ly/2, Ly/2]; the boundary carries implicit zeros and is
/// not stored. In both cases sites are indexed row-major, iy*cols + ix.
class Lattice {
 public:
  explicit Lattice(const LatticeSpec& spec);

  const LatticeSpec& spec() const { return spec_; }
  LatticeKind kind() const { return spec_.kind; }
  bool is_torus() const { return spec_.kind == LatticeKind::torus; }

  double extent_x() const { return spec_.extent_x; }
  double extent_y() const { return spec_.extent_y; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double cell_area() const { return hx_ * hy_; }
  double spacing(Direction d) const;

  /// Stored site columns/rows (nx, ny on torus; nx-1, ny-1 on rectangle).
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  Index sites() const { return static_cast<Index>(cols_) * rows_; }

  int column(Index site) const { return static_cast<int>(site % cols_); }
  int row(Index site) const { return static_cast<int>(site / cols_); }

  /// Site at stored grid coordinates, wrapping on the torus; -1 outside the
  /// rectangle interior.
  Index site_at(int col, int row) const;

  /// Neighbor in the given direction or -1 when the step leaves the domain.
  Index neighbor(Index site, Direction d) const;

  /// Whether the step from `site` in direction `d` crosses the torus seam.
  bool crosses_seam(Index site, Direction d) const;

  Eigen::Vector2d position(Index site) const;

  /// Distance to the truncation boundary (infinity on the torus).
  double boundary_distance(Index site) const;

  /// Lower-left corners of plaquettes whose four corners are stored sites.
  const std::vector<Index>& plaquettes() const { return plaquettes_; }

  Eigen::Vector2d plaquette_center(Index lower_left) const;

  /// Number of stored directed edges counted once per orientation pair.
  Index edge_count() const;

 private:
  LatticeSpec spec_;
  double hx_ = 0.0;
  double hy_ = 0.0;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<Index> plaquettes_;
};

/// Convenience wrapper that validates and builds.
Lattice build_lattice(const LatticeSpec& spec);

/// Geodesic lattice distance to a target mask.
struct DistanceField {
  VectorXd values;
  SiteMask target;
};

/// Smoothed distance used as the exponential weight.
struct WeightField {
  VectorXd values;
  double radius = 0.0;
  double p = 1.0;
  bool degraded = false;  // radius below spacing; values equal the raw distance
};

DistanceField distance_to_set(const Lattice& lattice, const SiteMask& mask);

WeightField smooth_distance(const Lattice& lattice, const DistanceField& dist, double p);

}  // namespace bochner
