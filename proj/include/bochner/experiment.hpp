#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bochner/eigensolver.hpp"
#include "bochner/lattice.hpp"
#include "bochner/localization.hpp"
#include "bochner/magnetic.hpp"
#include "bochner/model_spectrum.hpp"
#include "bochner/operator.hpp"

namespace bochner {

enum class ExperimentId { torus_constant, plane_radial_dip, plane_potential_bump };
enum class Resolution { standard, high_accuracy };
/// Which part of sigma(H_p) goes into spectrum.csv.
enum class SpectrumRange { lowest, cutoff, window };

std::string to_string(ExperimentId id);
std::string to_string(Resolution r);
std::string to_string(SpectrumRange r);

struct LatticeSettings {
  LatticeKind kind = LatticeKind::torus;
  double extent = 0.0;      // torus side; 0 = 2 pi
  double half_width = 0.0;  // rectangle; 0 = truncation rule
  int nx = 0;               // 0 = resolution rule
};

struct SolverSettings {
  double tol = 0.0;
  int max_cycles = 400;
  int krylov_depth = 3;
  Index max_per_slice = 48;
  int polish_steps = 2;
  SpectrumRange spectrum = SpectrumRange::lowest;
  Index lowest_count = 0;  // 0 = p * c1 on the torus, otherwise 20
  double margin = 0.05;    // gap window is [a + margin, b - margin]
};

struct AnalysisSettings {
  double c_min = 0.0;  // 0 = 0.2 sqrt(b_min)
  double c_cap = 10.0;
  double c_max = 3.0;
  int c_steps = 31;
  double decay_floor = 1e-12;
  int trials = 0;          // band-limited trial vectors per p
  double bandwidth = 4.0;  // per unit length
  double taper = 2.0;      // magnetic lengths
  double far_mass = 0.05;
};

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::torus_constant;
  std::vector<int> p;
  std::optional<double> window_lo;
  std::optional<double> window_hi;
  double cutoff = 0.0;  // 0 = window top + 2 b_max
  Resolution resolution = Resolution::standard;
  std::string output = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  Index max_sites = 400000;

  LatticeSettings lattice;
  FieldSpec field;
  int c1 = 1;  // torus Chern number; fixes the constant field
  PotentialSpec potential;
  std::string potential_file;
  SolverSettings solver;
  AnalysisSettings analysis;

  double window_low() const { return window_lo.value_or(0.0); }
  double window_high() const { return window_hi.value_or(0.0); }
  double max_ratio() const { return resolution == Resolution::standard ? 0.25 : 0.1; }
};

/// Parses the sectioned key = value format; fills preset defaults and
/// validates. Throws Error(invalid_config).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
ExperimentConfig preset_config(ExperimentId id);
ExperimentId parse_experiment_id(const std::string& name);

/// Checks invariants after command-line overrides. Throws Error(invalid_config).
void validate_config(const ExperimentConfig& cfg);

/// Renders a config back into the file format.
std::string echo_config(const ExperimentConfig& cfg);

/// Lattice for one p following the resolution and truncation rules.
LatticeSpec plan_lattice(const ExperimentConfig& cfg, int p);

/// Radius of the interface set measured on a probe lattice (plane presets).
double interface_radius(const ExperimentConfig& cfg);

/// Everything derived from the config at one tensor power.
struct Instance {
  explicit Instance(Lattice lat) : lattice(std::move(lat)) {}

  int p = 0;
  std::uint64_t seed = 0;
  Lattice lattice;
  Gauge gauge = Gauge::landau;
  ScalarField b;
  PotentialField v;
  GaugeLinks links;
  SparseHermitian h;
  SigmaUnion sigma;
  InterfaceSet interface;
  double b_min = 0.0;
  double b_max = 0.0;
  double cutoff = 0.0;
};

Instance build_instance(const ExperimentConfig& cfg, int p);

SolverOptions solver_options(const ExperimentConfig& cfg, std::uint64_t seed);

/// Seed for the entry at tensor power p.
std::uint64_t entry_seed(std::uint64_t seed, int p);

}  // namespace bochner
