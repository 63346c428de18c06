#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <locale>
#include <map>
#include <numbers>
#include <sstream>

#include "bochner/error.hpp"
#include "bochner/experiment.hpp"

namespace bochner {

namespace {

[[noreturn]] void reject(const std::string& what) { throw Error(ErrorCode::invalid_config, what); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Item {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string where(const Item& it) {
  const std::string name = it.section.empty() ? it.key : it.section + "." + it.key;
  return "line " + std::to_string(it.line) + " (" + name + ")";
}

double as_double(const Item& it) {
  try {
    std::size_t used = 0;
    const double v = std::stod(it.value, &used);
    if (used != it.value.size() || !std::isfinite(v)) throw std::invalid_argument(it.value);
    return v;
  } catch (const std::exception&) {
    reject(where(it) + ": expected a number, got '" + it.value + "'");
  }
}

long long as_integer(const Item& it) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it.value, &used);
    if (used != it.value.size()) throw std::invalid_argument(it.value);
    return v;
  } catch (const std::exception&) {
    reject(where(it) + ": expected an integer, got '" + it.value + "'");
  }
}

bool is_auto(const Item& it) { return lower(it.value) == "auto"; }

std::vector<double> as_list(const Item& it) {
  std::string body = it.value;
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') reject(where(it) + ": unterminated list");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    Item sub = it;
    sub.value = tok;
    out.push_back(as_double(sub));
  }
  return out;
}

std::vector<Item> tokenize(const std::string& text) {
  std::vector<Item> items;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[' && body.find('=') == std::string::npos) {
      if (body.back() != ']') reject("syntax error at line " + std::to_string(line) + ": bad section header");
      section = lower(trim(body.substr(1, body.size() - 2)));
      if (section.empty()) reject("syntax error at line " + std::to_string(line) + ": empty section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      reject("syntax error at line " + std::to_string(line) + ": expected key = value");
    }
    Item it{section, lower(trim(body.substr(0, eq))), trim(body.substr(eq + 1)), line};
    if (it.key.empty()) reject("syntax error at line " + std::to_string(line) + ": missing key");
    if (it.value.size() >= 2 && it.value.front() == '"' && it.value.back() == '"') {
      it.value = it.value.substr(1, it.value.size() - 2);
    }
    items.push_back(std::move(it));
  }
  return items;
}

LatticeKind parse_lattice_kind(const Item& it) {
  const std::string v = lower(it.value);
  if (v == "torus") return LatticeKind::torus;
  if (v == "rectangle" || v == "rectangle_dirichlet") return LatticeKind::rectangle_dirichlet;
  reject(where(it) + ": unknown lattice kind '" + it.value + "'");
}

FieldSpec::Preset parse_field_preset(const Item& it) {
  const std::string v = lower(it.value);
  if (v == "constant") return FieldSpec::Preset::constant;
  if (v == "radial_dip") return FieldSpec::Preset::radial_dip;
  if (v == "radial_bump") return FieldSpec::Preset::radial_bump;
  if (v == "transition") return FieldSpec::Preset::transition;
  reject(where(it) + ": unknown field preset '" + it.value + "'");
}

SpectrumRange parse_range(const Item& it) {
  const std::string v = lower(it.value);
  if (v == "lowest") return SpectrumRange::lowest;
  if (v == "cutoff") return SpectrumRange::cutoff;
  if (v == "window") return SpectrumRange::window;
  reject(where(it) + ": unknown spectrum range '" + it.value + "'");
}

struct PotentialDraft {
  std::string kind = "";
  std::optional<double> value;
  std::vector<double> diagonal;
  std::optional<double> height;
  std::optional<double> width;
  std::optional<int> rank;
};

void apply_top(ExperimentConfig& cfg, const Item& it) {
  if (it.key == "experiment") return;
  if (it.key == "p") {
    cfg.p.clear();
    for (double v : as_list(it)) {
      if (v != std::floor(v) || v < 1 || v > 1e6) reject(where(it) + ": p must be positive integers");
      cfg.p.push_back(static_cast<int>(v));
    }
    if (cfg.p.empty()) reject(where(it) + ": p list is empty");
  } else if (it.key == "window") {
    const auto w = as_list(it);
    if (w.size() != 2) reject(where(it) + ": window needs two numbers a, b");
    cfg.window_lo = w[0];
    cfg.window_hi = w[1];
  } else if (it.key == "cutoff") {
    cfg.cutoff = is_auto(it) ? 0.0 : as_double(it);
  } else if (it.key == "resolution") {
    const std::string v = lower(it.value);
    if (v == "standard") {
      cfg.resolution = Resolution::standard;
    } else if (v == "high_accuracy" || v == "high-accuracy") {
      cfg.resolution = Resolution::high_accuracy;
    } else {
      reject(where(it) + ": resolution is standard or high_accuracy");
    }
  } else if (it.key == "output") {
    cfg.output = it.value;
  } else if (it.key == "seed") {
    const long long s = as_integer(it);
    if (s < 0) reject(where(it) + ": seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (it.key == "threads") {
    cfg.threads = static_cast<int>(as_integer(it));
  } else if (it.key == "max_sites") {
    cfg.max_sites = static_cast<Index>(as_integer(it));
  } else {
    reject(where(it) + ": unknown key '" + it.key + "'");
  }
}

void apply_lattice(ExperimentConfig& cfg, const Item& it) {
  LatticeSettings& l = cfg.lattice;
  if (it.key == "kind") {
    l.kind = parse_lattice_kind(it);
  } else if (it.key == "extent") {
    l.extent = is_auto(it) ? 0.0 : as_double(it);
  } else if (it.key == "half_width") {
    l.half_width = is_auto(it) ? 0.0 : as_double(it);
  } else if (it.key == "nx") {
    l.nx = is_auto(it) ? 0 : static_cast<int>(as_integer(it));
  } else {
    reject(where(it) + ": unknown key '" + it.key + "'");
  }
}

void apply_field(ExperimentConfig& cfg, const Item& it) {
  FieldSpec& f = cfg.field;
  if (it.key == "preset") {
    f.preset = parse_field_preset(it);
  } else if (it.key == "b") {
    f.b = as_double(it);
  } else if (it.key == "b_inf") {
    f.b_inf = as_double(it);
  } else if (it.key == "depth") {
    f.depth = as_double(it);
  } else if (it.key == "height") {
    f.height = as_double(it);
  } else if (it.key == "width") {
    f.width = as_double(it);
  } else if (it.key == "b_minus") {
    f.b_minus = as_double(it);
  } else if (it.key == "b_plus") {
    f.b_plus = as_double(it);
  } else if (it.key == "c1") {
    cfg.c1 = static_cast<int>(as_integer(it));
  } else {
    reject(where(it) + ": unknown key '" + it.key + "'");
  }
}

void apply_potential(ExperimentConfig& cfg, PotentialDraft& draft, const Item& it) {
  if (it.key == "kind") {
    draft.kind = lower(it.value);
  } else if (it.key == "value") {
    draft.value = as_double(it);
  } else if (it.key == "diagonal") {
    draft.diagonal = as_list(it);
  } else if (it.key == "height") {
    draft.height = as_double(it);
  } else if (it.key == "width") {
    draft.width = as_double(it);
  } else if (it.key == "rank") {
    draft.rank = static_cast<int>(as_integer(it));
  } else if (it.key == "file") {
    cfg.potential_file = it.value;
  } else {
    reject(where(it) + ": unknown key '" + it.key + "'");
  }
}

void apply_solver(ExperimentConfig& cfg, const Item& it) {
  SolverSettings& s = cfg.solver;
  if (it.key == "tol") {
    s.tol = is_auto(it) ? 0.0 : as_double(it);
  } else if (it.key == "max_cycles") {
    s.max_cycles = static_cast<int>(as_integer(it));
  } else if (it.key == "krylov_depth") {
    s.krylov_depth = static_cast<int>(as_integer(it));
  } else if (it.key == "max_per_slice") {
    s.max_per_slice = static_cast<Index>(as_integer(it));
  } else if (it.key == "polish_steps") {
    s.polish_steps = static_cast<int>(as_integer(it));
  } else if (it.key == "spectrum") {
    s.spectrum = parse_range(it);
  } else if (it.key == "lowest_count") {
    s.lowest_count = is_auto(it) ? 0 : static_cast<Index>(as_integer(it));
  } else if (it.key == "margin") {
    s.margin = as_double(it);
  } else {
    reject(where(it) + ": unknown key '" + it.key + "'");
  }
}

void apply_analysis(ExperimentConfig& cfg, const Item& it) {
  AnalysisSettings& a = cfg.analysis;
  if (it.key == "c_min") {
    a.c_min = is_auto(it) ? 0.0 : as_double(it);
  } else if (it.key == "c_cap") {
    a.c_cap = as_double(it);
  } else if (it.key == "c_max") {
    a.c_max = as_double(it);
  } else if (it.key == "c_steps") {
    a.c_steps = static_cast<int>(as_integer(it));
  } else if (it.key == "decay_floor") {
    a.decay_floor = as_double(it);
  } else if (it.key == "trials") {
    a.trials = static_cast<int>(as_integer(it));
  } else if (it.key == "bandwidth") {
    a.bandwidth = as_double(it);
  } else if (it.key == "taper") {
    a.taper = as_double(it);
  } else if (it.key == "far_mass") {
    a.far_mass = as_double(it);
  } else {
    reject(where(it) + ": unknown key '" + it.key + "'");
  }
}

void finish_potential(ExperimentConfig& cfg, const PotentialDraft& d) {
  const int rank = d.rank.value_or(cfg.potential.rank);
  if (rank < 1 || rank > 8) reject("potential.rank must be in 1..8");
  const std::string kind = d.kind.empty() ? "" : d.kind;
  if (kind.empty()) {
    if (d.value || !d.diagonal.empty() || d.height || d.width || d.rank) {
      // Tweaks to the preset potential.
      if (cfg.potential.kind == PotentialSpec::Kind::radial_bump) {
        cfg.potential = PotentialSpec::radial_bump(d.height.value_or(cfg.potential.height),
                                                   d.width.value_or(cfg.potential.width), rank);
        return;
      }
      reject("potential settings need potential.kind");
    }
    return;
  }
  if (kind == "zero") {
    cfg.potential = PotentialSpec::zero(rank);
  } else if (kind == "constant") {
    MatrixXcd m = MatrixXcd::Zero(rank, rank);
    if (!d.diagonal.empty()) {
      if (static_cast<int>(d.diagonal.size()) != rank) reject("potential.diagonal needs rank entries");
      for (int i = 0; i < rank; ++i) m(i, i) = d.diagonal[static_cast<std::size_t>(i)];
    } else {
      m.diagonal().setConstant(d.value.value_or(0.0));
    }
    cfg.potential = PotentialSpec::constant(m);
  } else if (kind == "radial_bump") {
    cfg.potential = PotentialSpec::radial_bump(d.height.value_or(1.0), d.width.value_or(1.0), rank);
  } else if (kind == "file") {
    if (cfg.potential_file.empty()) reject("potential.kind = file needs potential.file");
    cfg.potential = PotentialSpec::zero(rank);
    cfg.potential.kind = PotentialSpec::Kind::per_site;
  } else {
    reject("unknown potential kind '" + kind + "'");
  }
}

double torus_side(const ExperimentConfig& cfg) {
  return cfg.lattice.extent > 0.0 ? cfg.lattice.extent : 2.0 * std::numbers::pi;
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::torus_constant: return "torus_constant";
    case ExperimentId::plane_radial_dip: return "plane_radial_dip";
    case ExperimentId::plane_potential_bump: return "plane_potential_bump";
  }
  return "unknown";
}

std::string to_string(Resolution r) { return r == Resolution::standard ? "standard" : "high_accuracy"; }

std::string to_string(SpectrumRange r) {
  switch (r) {
    case SpectrumRange::lowest: return "lowest";
    case SpectrumRange::cutoff: return "cutoff";
    case SpectrumRange::window: return "window";
  }
  return "unknown";
}

ExperimentId parse_experiment_id(const std::string& name) {
  const std::string v = lower(trim(name));
  if (v == "torus_constant" || v == "a") return ExperimentId::torus_constant;
  if (v == "plane_radial_dip" || v == "b") return ExperimentId::plane_radial_dip;
  if (v == "plane_potential_bump" || v == "c") return ExperimentId::plane_potential_bump;
  reject("unknown experiment '" + name + "'");
}

ExperimentConfig preset_config(ExperimentId id) {
  ExperimentConfig cfg;
  cfg.experiment = id;
  switch (id) {
    case ExperimentId::torus_constant:
      cfg.p = {4, 8, 16};
      cfg.lattice.kind = LatticeKind::torus;
      cfg.field = FieldSpec::constant(1.0);
      cfg.potential = PotentialSpec::zero();
      cfg.solver.spectrum = SpectrumRange::lowest;
      cfg.output = "out/torus_constant";
      break;
    case ExperimentId::plane_radial_dip:
      cfg.p = {8, 16, 32, 64};
      cfg.window_lo = 1.6;
      cfg.window_hi = 2.4;
      cfg.lattice.kind = LatticeKind::rectangle_dirichlet;
      cfg.field = FieldSpec::radial_dip(1.0, 0.3, 1.0);
      cfg.potential = PotentialSpec::zero();
      cfg.solver.spectrum = SpectrumRange::cutoff;
      cfg.output = "out/plane_radial_dip";
      break;
    case ExperimentId::plane_potential_bump:
      cfg.p = {16, 32, 64};
      cfg.window_lo = 1.3;
      cfg.window_hi = 1.7;
      cfg.lattice.kind = LatticeKind::rectangle_dirichlet;
      cfg.field = FieldSpec::constant(1.0);
      cfg.potential = PotentialSpec::radial_bump(1.0, 1.0);
      cfg.solver.spectrum = SpectrumRange::window;
      cfg.analysis.trials = 100;
      cfg.output = "out/plane_potential_bump";
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  const std::vector<Item> items = tokenize(text);
  const Item* head = nullptr;
  for (const Item& it : items) {
    if (it.section.empty() && it.key == "experiment") {
      if (head) reject(where(it) + ": experiment given twice");
      head = &it;
    }
  }
  if (!head) reject("missing required key 'experiment'");
  ExperimentConfig cfg = preset_config(parse_experiment_id(head->value));

  const bool field_given = std::any_of(items.begin(), items.end(), [](const Item& it) {
    return it.section == "field" && it.key != "c1";
  });
  PotentialDraft draft;
  for (const Item& it : items) {
    if (it.section.empty()) {
      apply_top(cfg, it);
    } else if (it.section == "lattice") {
      apply_lattice(cfg, it);
    } else if (it.section == "field") {
      apply_field(cfg, it);
    } else if (it.section == "potential") {
      apply_potential(cfg, draft, it);
    } else if (it.section == "solver") {
      apply_solver(cfg, it);
    } else if (it.section == "analysis") {
      apply_analysis(cfg, it);
    } else {
      reject(where(it) + ": unknown section '" + it.section + "'");
    }
  }
  finish_potential(cfg, draft);

  // The torus field is fixed by the Chern number unless set explicitly.
  if (cfg.lattice.kind == LatticeKind::torus && !field_given) {
    const double side = torus_side(cfg);
    cfg.field = FieldSpec::constant(2.0 * std::numbers::pi * cfg.c1 / (side * side));
  }
  if (cfg.experiment == ExperimentId::torus_constant && !cfg.window_lo) {
    const double b = cfg.field.b;
    cfg.window_lo = 1.5 * b;
    cfg.window_hi = 2.5 * b;
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.p.empty()) reject("p list is empty");
  for (std::size_t i = 0; i < cfg.p.size(); ++i) {
    if (cfg.p[i] < 1) reject("p entries must be >= 1");
    if (i > 0 && cfg.p[i] <= cfg.p[i - 1]) reject("p list must be strictly ascending");
  }
  if (!cfg.window_lo || !cfg.window_hi) reject("window [a, b] is required");
  const double lo = *cfg.window_lo;
  const double hi = *cfg.window_hi;
  if (!(lo < hi)) reject("window needs a < b");
  if (cfg.solver.margin < 0.0 || !(lo + cfg.solver.margin < hi - cfg.solver.margin)) {
    reject("window margin leaves no interior");
  }
  if (cfg.cutoff != 0.0 && !(cfg.cutoff > hi)) reject("cutoff must exceed the window top");
  if (!(cfg.field.infimum() > 0.0)) reject("field must be uniformly positive (inf b > 0)");
  if (cfg.threads < 1) reject("threads must be >= 1");
  if (cfg.max_sites < 16) reject("max_sites is too small");
  if (cfg.solver.max_cycles < 1 || cfg.solver.krylov_depth < 0 || cfg.solver.max_per_slice < 1 ||
      cfg.solver.polish_steps < 0 || cfg.solver.tol < 0.0) {
    reject("solver settings out of range");
  }
  const AnalysisSettings& a = cfg.analysis;
  if (a.c_min < 0.0 || !(a.c_cap >= 1.0) || !(a.c_max > 0.0) || a.c_steps < 2 ||
      !(a.decay_floor > 0.0) || a.trials < 0 || !(a.bandwidth > 0.0) || !(a.taper > 0.0) ||
      !(a.far_mass >= 0.0)) {
    reject("analysis settings out of range");
  }
  if (cfg.lattice.kind == LatticeKind::torus && cfg.lattice.half_width != 0.0) {
    reject("half_width applies to rectangle lattices only");
  }
  if (cfg.lattice.nx != 0 && cfg.lattice.nx < 4) reject("lattice.nx must be >= 4");
  for (int p : cfg.p) {
    const LatticeSpec spec = plan_lattice(cfg, p);
    const Index sites = spec.kind == LatticeKind::torus
                            ? static_cast<Index>(spec.nx) * spec.ny
                            : static_cast<Index>(spec.nx - 1) * (spec.ny - 1);
    if (sites > cfg.max_sites) {
      reject("resolution rule needs " + std::to_string(spec.nx) + "x" + std::to_string(spec.ny) +
             " (" + std::to_string(sites) + " sites) at p = " + std::to_string(p) +
             ", above max_sites = " + std::to_string(cfg.max_sites));
    }
    const double h = std::max(spec.extent_x / spec.nx, spec.extent_y / spec.ny);
    if (cfg.lattice.nx != 0 && h * std::sqrt(p * cfg.field.supremum()) > cfg.max_ratio() + 1e-12) {
      reject("lattice.nx = " + std::to_string(cfg.lattice.nx) + " violates the resolution rule at p = " +
             std::to_string(p));
    }
  }
}

double interface_radius(const ExperimentConfig& cfg) {
  const double scale = std::max({1.0, cfg.field.width, cfg.potential.width});
  const double half = 4.0 * scale + 2.0;
  const int n = 240;
  const Lattice probe(LatticeSpec{LatticeKind::rectangle_dirichlet, 2.0 * half, 2.0 * half, n, n});
  const ScalarField b = sample_field(cfg.field, probe);
  PotentialSpec pot = cfg.potential;
  if (pot.kind == PotentialSpec::Kind::per_site) pot = PotentialSpec::zero(pot.rank);
  const PotentialField v = sample_potential(pot, probe);
  const SiteMask all = SiteMask::Constant(probe.sites(), true);
  const double cutoff = cfg.cutoff > 0.0 ? cfg.cutoff : default_cutoff(cfg.window_high(), b, all);
  const InterfaceSet k = interface_set(probe, b, v, cfg.window_low(), cfg.window_high(), cutoff);
  double radius = 0.0;
  for (Index s = 0; s < probe.sites(); ++s) {
    if (!k.mask(s)) continue;
    if (probe.boundary_distance(s) < 2.0 * probe.hx()) {
      reject("interface set is not bounded inside the probe domain of half-width " + std::to_string(half));
    }
    radius = std::max(radius, probe.position(s).norm());
  }
  return k.empty() ? 0.0 : radius + probe.hx();
}

LatticeSpec plan_lattice(const ExperimentConfig& cfg, int p) {
  const double ratio = cfg.max_ratio();
  const double b_max = cfg.field.supremum();
  const double b_min = cfg.field.infimum();
  LatticeSpec spec;
  spec.kind = cfg.lattice.kind;
  if (spec.kind == LatticeKind::torus) {
    const double side = torus_side(cfg);
    spec.extent_x = spec.extent_y = side;
    spec.nx = cfg.lattice.nx > 0 ? cfg.lattice.nx
                                 : std::max(4, static_cast<int>(std::ceil(side * std::sqrt(p * b_max) / ratio)));
  } else {
    double half = cfg.lattice.half_width;
    if (half <= 0.0) half = interface_radius(cfg) + 6.0 / std::sqrt(p * b_min);
    spec.extent_x = spec.extent_y = 2.0 * half;
    spec.nx = cfg.lattice.nx > 0
                  ? cfg.lattice.nx
                  : std::max(4, static_cast<int>(std::ceil(2.0 * half * std::sqrt(p * b_max) / ratio)));
  }
  spec.ny = spec.nx;
  return spec;
}

namespace {

// Shortest round-trip text for every double written to the stream.
struct ShortestDoubles : std::num_put<char> {
  iter_type do_put(iter_type out, std::ios_base&, char, double v) const override {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::copy(buf, r.ptr, out);
  }
};

}  // namespace

std::string echo_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.imbue(std::locale(std::locale::classic(), new ShortestDoubles));
  os << "experiment = " << to_string(cfg.experiment) << "\n";
  os << "p = [";
  for (std::size_t i = 0; i < cfg.p.size(); ++i) os << (i ? ", " : "") << cfg.p[i];
  os << "]\n";
  os << "window = " << cfg.window_low() << ", " << cfg.window_high() << "\n";
  os << "cutoff = ";
  if (cfg.cutoff > 0.0) {
    os << cfg.cutoff << "\n";
  } else {
    os << "auto\n";
  }
  os << "resolution = " << to_string(cfg.resolution) << "\n";
  os << "output = " << cfg.output << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "threads = " << cfg.threads << "\n";
  os << "max_sites = " << cfg.max_sites << "\n\n";
  os << "[lattice]\nkind = " << (cfg.lattice.kind == LatticeKind::torus ? "torus" : "rectangle") << "\n";
  if (cfg.lattice.kind == LatticeKind::torus) os << "extent = " << torus_side(cfg) << "\n";
  if (cfg.lattice.half_width > 0.0) os << "half_width = " << cfg.lattice.half_width << "\n";
  if (cfg.lattice.nx > 0) os << "nx = " << cfg.lattice.nx << "\n";
  os << "\n[field]\n# " << cfg.field.describe() << "\n";
  const FieldSpec& f = cfg.field;
  switch (f.preset) {
    case FieldSpec::Preset::constant: os << "preset = constant\nb = " << f.b << "\n"; break;
    case FieldSpec::Preset::radial_dip:
      os << "preset = radial_dip\nb_inf = " << f.b_inf << "\ndepth = " << f.depth << "\nwidth = " << f.width << "\n";
      break;
    case FieldSpec::Preset::radial_bump:
      os << "preset = radial_bump\nb_inf = " << f.b_inf << "\nheight = " << f.height << "\nwidth = " << f.width
         << "\n";
      break;
    case FieldSpec::Preset::transition:
      os << "preset = transition\nb_minus = " << f.b_minus << "\nb_plus = " << f.b_plus << "\nwidth = " << f.width
         << "\n";
      break;
  }
  if (cfg.lattice.kind == LatticeKind::torus) os << "c1 = " << cfg.c1 << "\n";
  os << "\n[potential]\n# " << cfg.potential.describe() << "\n";
  const PotentialSpec& v = cfg.potential;
  switch (v.kind) {
    case PotentialSpec::Kind::zero: os << "kind = zero\n"; break;
    case PotentialSpec::Kind::constant: {
      os << "kind = constant\ndiagonal = ";
      for (Index i = 0; i < v.base.rows(); ++i) os << (i ? ", " : "") << v.base(i, i).real();
      os << "\n";
      break;
    }
    case PotentialSpec::Kind::radial_bump:
      os << "kind = radial_bump\nheight = " << v.height << "\nwidth = " << v.width << "\n";
      break;
    case PotentialSpec::Kind::per_site: os << "kind = file\nfile = " << cfg.potential_file << "\n"; break;
  }
  os << "rank = " << v.rank << "\n";
  const SolverSettings& s = cfg.solver;
  os << "\n[solver]\ntol = ";
  if (s.tol > 0.0) {
    os << s.tol << "\n";
  } else {
    os << "auto\n";
  }
  os << "max_cycles = " << s.max_cycles << "\nkrylov_depth = " << s.krylov_depth
     << "\nmax_per_slice = " << s.max_per_slice << "\npolish_steps = " << s.polish_steps
     << "\nspectrum = " << to_string(s.spectrum) << "\nlowest_count = ";
  if (s.lowest_count > 0) {
    os << s.lowest_count << "\n";
  } else {
    os << "auto\n";
  }
  os << "margin = " << s.margin << "\n";
  const AnalysisSettings& a = cfg.analysis;
  os << "\n[analysis]\nc_min = ";
  if (a.c_min > 0.0) {
    os << a.c_min << "\n";
  } else {
    os << "auto\n";
  }
  os << "c_cap = " << a.c_cap << "\nc_max = " << a.c_max << "\nc_steps = " << a.c_steps
     << "\ndecay_floor = " << a.decay_floor << "\ntrials = " << a.trials << "\nbandwidth = " << a.bandwidth
     << "\ntaper = " << a.taper << "\nfar_mass = " << a.far_mass << "\n";
  return os.str();
}

std::uint64_t entry_seed(std::uint64_t seed, int p) {
  // splitmix64 finalizer over (seed, p)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(p + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SolverOptions solver_options(const ExperimentConfig& cfg, std::uint64_t seed) {
  SolverOptions o;
  o.tol = cfg.solver.tol;
  o.max_cycles = cfg.solver.max_cycles;
  o.krylov_depth = cfg.solver.krylov_depth;
  o.max_per_slice = cfg.solver.max_per_slice;
  o.polish_steps = cfg.solver.polish_steps;
  o.seed = seed;
  return o;
}

Instance build_instance(const ExperimentConfig& cfg, int p) {
  Instance in{Lattice(plan_lattice(cfg, p))};
  in.p = p;
  in.seed = entry_seed(cfg.seed, p);
  in.gauge = default_gauge(cfg.field, in.lattice);
  in.b = sample_field(cfg.field, in.lattice);
  PotentialSpec pot = cfg.potential;
  if (pot.kind == PotentialSpec::Kind::per_site) pot = load_potential_file(cfg.potential_file, pot.rank);
  in.v = sample_potential(pot, in.lattice);
  in.links = gauge_links(edge_integrals(cfg.field, in.lattice, in.gauge), p);
  in.h = assemble_H(in.lattice, in.links, in.v, p);
  in.b_min = in.b.values.minCoeff();
  in.b_max = in.b.values.maxCoeff();
  const SiteMask all = SiteMask::Constant(in.lattice.sites(), true);
  in.cutoff = cfg.cutoff > 0.0 ? cfg.cutoff : default_cutoff(cfg.window_high(), in.b, all);
  in.sigma = sigma_region(in.lattice, in.b, in.v, all, in.cutoff);
  in.interface = interface_set(in.lattice, in.b, in.v, cfg.window_low(), cfg.window_high(), in.cutoff);
  return in;
}

}  // namespace bochner
