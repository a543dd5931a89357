#include "pspin/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "pspin/anneal.hpp"
#include "pspin/output.hpp"
#include "pspin/phase_diagram.hpp"
#include "pspin/spectrum.hpp"

namespace pspin::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw DomainError("not an integer: '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw DomainError("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<int> parse_size_list(const std::string& text) {
  std::vector<int> out;
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() < 2 || parts.size() > 3) throw DomainError("size range must be start:stop[:step]");
    const int start = to_int(parts[0]);
    const int stop = to_int(parts[1]);
    const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
    if (step <= 0 || stop < start) throw DomainError("size range needs start <= stop and step > 0");
    for (int n = start; n <= stop; n += step) out.push_back(n);
  } else {
    for (const auto& part : split(t, ',')) out.push_back(to_int(part));
  }
  if (out.empty()) throw DomainError("empty size list");
  for (int n : out) {
    if (n <= 0) throw DomainError("system sizes must be positive");
  }
  return out;
}

InteractionOrder parse_order(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return InteractionOrder::limit();
  return InteractionOrder::finite(to_int(t));
}

InverseTemperature parse_beta(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return InverseTemperature::infinite();
  return InverseTemperature::finite(to_double(t));
}

std::vector<SchedulePoint> parse_points(const std::string& text) {
  std::vector<SchedulePoint> out;
  for (const auto& item : split(text, ',')) {
    const auto xy = split(item, ':');
    if (xy.size() != 2) throw DomainError("path points must be written s:lambda");
    out.push_back({to_double(xy[0]), to_double(xy[1])});
  }
  if (out.empty()) throw DomainError("empty path");
  return out;
}

namespace {

struct Common {
  int threads = 1;
  std::string output_dir = ".";
  std::string output;
  std::string format = "csv";
  std::string config;
};

void add_common(CLI::App* sub, Common& c, bool with_format) {
  sub->add_option("--threads", c.threads, "worker threads")->envname("PSPIN_THREADS")->check(CLI::PositiveNumber);
  sub->add_option("--output-dir", c.output_dir, "directory for relative output paths")->envname("PSPIN_OUTPUT_DIR");
  sub->add_option("--output", c.output, "output path prefix, or - for stdout");
  if (with_format) sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--config", c.config, "key=value file; explicit flags win");
}

// Every option of the subcommand with its effective value, in declaration order.
io::RunHeader make_header(const CLI::App* sub) {
  io::RunHeader h;
  h.command = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      value = r.empty() ? "" : r.back();
    } else {
      value = opt->get_default_str();
    }
    h.config.emplace_back(name, value);
  }
  return h;
}

class Sink {
 public:
  Sink(const Common& c, std::string default_base) : common_(c), base_(c.output.empty() ? default_base : c.output) {}

  bool to_stdout() const { return base_ == "-"; }

  // Opens base + suffix, or stdout.
  std::ostream& open(const std::string& suffix) {
    if (to_stdout()) return std::cout;
    std::filesystem::path path(base_ + suffix);
    if (path.is_relative()) path = std::filesystem::path(common_.output_dir) / path;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    files_.push_back(std::make_unique<std::ofstream>(path, std::ios::binary));
    if (!*files_.back()) throw DomainError("cannot open output file " + path.string());
    written_.push_back(path.string());
    return *files_.back();
  }

  void report() const {
    for (const auto& w : written_) std::cerr << "wrote " << w << '\n';
  }

 private:
  const Common& common_;
  std::string base_;
  std::vector<std::unique_ptr<std::ofstream>> files_;
  std::vector<std::string> written_;
};

std::string tag(double v) { return io::format_number(v); }

void warn_even(int p) {
  if (p % 2 == 0) std::cerr << "warning: even p=" << p << " lies outside the analysed (odd p) case\n";
}

// Expands `--config FILE` into flags placed before the user's own, so that
// explicit flags (parsed later, last one wins) take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> out;
  std::vector<std::string> from_file;
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (file.empty()) return out;
  std::ifstream in(file);
  if (!in) throw DomainError("cannot read config file " + file);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    from_file.push_back("--" + key);
    from_file.push_back(value);
  }
  // Insert right after the subcommand name (the first non-option argument).
  std::size_t at = 1;
  while (at < out.size() && out[at].rfind("-", 0) == 0) ++at;
  at = std::min(at + 1, out.size());
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), from_file.begin(), from_file.end());
  out.push_back("--config");
  out.push_back(file);
  return out;
}

// ---------------------------------------------------------------------------

struct SliceArgs {
  Common common;
  std::string p;
  double lambda = 0.0;
  double s_min = 0.0;
  double s_max = 0.995;
  int s_points = 200;
  std::string beta = "inf";
  double threshold = 1e-3;
  double refine = 1e-6;
  std::string seeds;
};

SolverOptions solver_with_seeds(const std::string& seeds) {
  SolverOptions o;
  if (!seeds.empty()) {
    o.seeds.clear();
    for (const auto& pt : parse_points(seeds)) {
      if (std::abs(pt.s) > 1.0 || std::abs(pt.lambda) > 1.0) throw DomainError("seed outside [-1,1]^2");
      o.seeds.push_back({pt.s, pt.lambda});
    }
  }
  return o;
}

int cmd_slice(const SliceArgs& a, const CLI::App* sub) {
  const InteractionOrder order = parse_order(a.p);
  if (!order.infinite && order.p < 3) throw DomainError("mean-field analysis requires p >= 3");
  if (!order.infinite) warn_even(order.p);
  const InverseTemperature beta = parse_beta(a.beta);
  if (order.infinite && !beta.is_infinite()) throw DomainError("p = inf is only available at zero temperature");
  if (!(a.s_max < 1.0)) throw DomainError("slice grid must stay below s = 1");
  const auto grid = uniform_grid(a.s_min, a.s_max, a.s_points);
  const SolverOptions solver = solver_with_seeds(a.seeds);
  const JumpOptions jump{a.threshold, a.refine, a.common.threads};

  SliceScan scan;
  if (beta.is_infinite()) {
    scan = detect_jump(order, a.lambda, grid, jump, solver);
  } else {
    if (!(a.lambda >= 0.0 && a.lambda <= 1.0)) throw DomainError("lambda outside [0,1]");
    for (double s : grid) {
      if (!(s >= 0.0 && s < 1.0)) throw DomainError("slice grid must lie within [0,1)");
    }
    const double lambda = a.lambda;
    auto at = [&](double s) { return classify_phase(order.p, {s, lambda}, beta, solver).stable; };
    static_cast<LineScan&>(scan) = locate_transitions(at, grid, {}, jump);
    scan.degenerate_line = lambda == 0.0;
  }

  const io::RunHeader header = make_header(sub);
  Sink sink(a.common, "slice_p" + order.to_string() + "_lambda" + tag(a.lambda));
  if (a.common.format == "json") {
    io::write_slice_json(sink.open(".json"), header, order, a.lambda, scan);
  } else {
    io::write_slice_csv(sink.open(".csv"), header, order, a.lambda, scan);
    io::write_transitions_csv(sink.open("_transitions.csv"), header, scan.transitions);
  }
  if (!sink.to_stdout()) {
    for (const auto& t : scan.transitions) {
      std::cout << to_string(t.order) << " transition at s=" << io::format_number(t.s) << " (" << to_string(t.before)
                << " -> " << to_string(t.after) << ", dmz=" << io::format_number(t.d_mz)
                << ", dmx=" << io::format_number(t.d_mx) << ")\n";
    }
    sink.report();
  }
  if (scan.degenerate_line) std::cerr << "note: lambda = 0 supports no annealing dynamics\n";
  if (scan.grid_too_coarse) std::cerr << "warning: two transitions share a grid cell; refine the grid\n";
  if (scan.nonconverged > 0) {
    std::cerr << "error: " << scan.nonconverged << " grid points without a converged solution\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DiagramArgs {
  Common common;
  std::string p;
  GridSpec grid;
  std::string seeds;
};

int cmd_phase_diagram(const DiagramArgs& a, const CLI::App* sub) {
  const InteractionOrder order = parse_order(a.p);
  if (!order.infinite && order.p < 3) throw DomainError("mean-field analysis requires p >= 3");
  if (!order.infinite) warn_even(order.p);
  const PhaseDiagram d = scan(order, a.grid, a.common.threads, solver_with_seeds(a.seeds));
  const io::RunHeader header = make_header(sub);
  Sink sink(a.common, "phase_diagram_p" + order.to_string());
  io::write_cells_csv(sink.open("_cells.csv"), header, d);
  io::write_boundaries_json(sink.open("_boundaries.json"), header, d);
  if (!sink.to_stdout()) {
    for (const auto& l : d.boundaries) {
      std::cout << boundary_tag(l.kind, l.order) << ": " << l.vertices.size() << " points from ("
                << io::format_number(l.vertices.front().s) << ", " << io::format_number(l.vertices.front().lambda)
                << ") to (" << io::format_number(l.vertices.back().s) << ", "
                << io::format_number(l.vertices.back().lambda) << ")\n";
    }
    sink.report();
  }
  if (d.grid_too_coarse) std::cerr << "warning: some grid cells hold two transitions\n";
  if (d.nonconverged > 0) {
    std::cerr << "error: " << d.nonconverged << " cells without a converged solution\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GapArgs {
  Common common;
  int p = 3;
  int spins = 0;
  double lambda = 0.0;
  double s_min = 0.0;
  double s_max = 1.0;
  int s_points = 2001;
  double refine_below = 0.1;
  double refine_tol = 1e-7;
  double window_threshold = 0.1;
};

GapCurve compute_curve(const GapArgs& a, int spins) {
  const auto grid = uniform_grid(a.s_min, a.s_max, a.s_points);
  return gap_curve(a.p, spins, a.lambda, grid, GapOptions{a.refine_below, a.common.threads});
}

int cmd_gap(const GapArgs& a, const CLI::App* sub) {
  validate(ModelParams{a.p, a.spins});
  warn_even(a.p);
  const GapCurve curve = compute_curve(a, a.spins);
  const auto minima = curve.samples.size() >= 3 ? find_local_minima(curve, a.refine_tol) : std::vector<GapMinimum>{};
  const SmallGapWindow window = small_gap_window(minima, a.window_threshold);
  const io::RunHeader header = make_header(sub);
  Sink sink(a.common, "gap_p" + std::to_string(a.p) + "_N" + std::to_string(a.spins) + "_lambda" + tag(a.lambda));
  if (a.common.format == "json") {
    io::write_gap_json(sink.open(".json"), header, curve, minima, window);
  } else {
    io::write_gap_csv(sink.open("_curve.csv"), header, curve);
    io::write_minima_csv(sink.open("_minima.csv"), header, minima);
  }
  if (!sink.to_stdout()) {
    std::cout << minima.size() << " local minima";
    if (window.found) {
      std::cout << "; small-gap window [" << io::format_number(window.left) << ", "
                << io::format_number(window.right) << "]";
    }
    std::cout << '\n';
    sink.report();
  }
  if (curve.near_degenerate) std::cerr << "warning: a sampled gap fell below 1e-13\n";
  return kExitOk;
}

struct ScalingArgs {
  GapArgs gap;
  std::string sizes = "40:160:20";
  std::string minimum = "global";
  int index = 1;
  std::string model = "both";
};

int cmd_scaling(const ScalingArgs& a, const CLI::App* sub) {
  const auto sizes = parse_size_list(a.sizes);
  for (int n : sizes) validate(ModelParams{a.gap.p, n});
  warn_even(a.gap.p);
  std::vector<std::vector<GapMinimum>> per_size;
  for (int n : sizes) {
    const GapCurve curve = compute_curve(a.gap, n);
    per_size.push_back(find_local_minima(curve, a.gap.refine_tol));
  }
  std::vector<GapMinimum> selected;
  if (a.minimum == "global") {
    selected = select_global(per_size);
  } else if (a.minimum == "rightmost") {
    selected = select_rightmost(per_size);
  } else {
    selected = select_ordinal(per_size, a.index);
  }
  std::vector<ScalingFit> fits;
  if (a.model == "power" || a.model == "both") fits.push_back(scaling_fit(selected, ScalingModel::Power));
  if (a.model == "exponential" || a.model == "both") fits.push_back(scaling_fit(selected, ScalingModel::Exponential));

  const io::RunHeader header = make_header(sub);
  Sink sink(a.gap.common, "scaling_p" + std::to_string(a.gap.p) + "_lambda" + tag(a.gap.lambda));
  if (a.gap.common.format == "json") {
    io::write_scaling_json(sink.open(".json"), header, selected, fits);
  } else {
    io::write_minima_csv(sink.open("_minima.csv"), header, selected);
    io::write_fits_csv(sink.open("_fits.csv"), header, fits);
  }
  if (!sink.to_stdout()) {
    for (const auto& f : fits) {
      std::cout << to_string(f.model) << ": a=" << io::format_number(f.a)
                << " exponent=" << io::format_number(f.exponent) << " rSquared=" << io::format_number(f.r_squared)
                << '\n';
    }
    sink.report();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AnnealArgs {
  Common common;
  int p = 3;
  int spins = 0;
  double tau = 0.0;
  double dt = 0.0;
  std::string lambda;
  double s_turn = 0.99;
  std::string path;
  std::string compare_lambda;
  std::string compare_path;
  int series_stride = 0;
};

AnnealPath make_path(const std::string& lambda, const std::string& points, double s_turn) {
  if (!points.empty() && !lambda.empty()) throw DomainError("give either a lambda or a path, not both");
  if (!points.empty()) return AnnealPath(parse_points(points));
  if (lambda.empty()) throw DomainError("a path needs --lambda or --path");
  return AnnealPath::constant_lambda(to_double(lambda), s_turn);
}

int cmd_anneal(const AnnealArgs& a, const CLI::App* sub) {
  validate(ModelParams{a.p, a.spins});
  warn_even(a.p);
  const std::optional<double> dt = a.dt > 0.0 ? std::optional<double>(a.dt) : std::nullopt;
  EvolveOptions options;
  options.series_stride = a.series_stride;
  std::vector<AnnealRun> runs;
  const AnnealPath first = make_path(a.lambda, a.path, a.s_turn);
  if (!a.compare_lambda.empty() || !a.compare_path.empty()) {
    const AnnealPath second = make_path(a.compare_lambda, a.compare_path, a.s_turn);
    auto pair = compare_paths(a.p, a.spins, a.tau, first, second, dt, a.common.threads, options);
    runs.push_back(std::move(pair.first));
    runs.push_back(std::move(pair.second));
  } else {
    runs.push_back(evolve(a.p, a.spins, first, a.tau, dt, options));
  }
  const io::RunHeader header = make_header(sub);
  Sink sink(a.common, "anneal_p" + std::to_string(a.p) + "_N" + std::to_string(a.spins));
  io::write_runs_json(sink.open(".json"), header, runs);
  if (a.series_stride > 0) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      io::write_series_csv(sink.open("_series" + std::to_string(k) + ".csv"), header, runs[k]);
    }
  }
  if (!sink.to_stdout()) {
    for (const auto& r : runs) {
      std::cout << r.path.describe() << ": fidelity=" << io::format_number(r.fidelity)
                << " residual_energy=" << io::format_number(r.residual_energy)
                << " norm_drift=" << io::format_number(r.norm_drift) << '\n';
    }
    sink.report();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct MatrixArgs {
  Common common;
  int p = 3;
  int spins = 0;
  double s = 0.0;
  double lambda = 0.0;
  std::string op = "H";
};

int cmd_matrix_dump(const MatrixArgs& a, const CLI::App* sub) {
  validate(ModelParams{a.p, a.spins});
  warn_even(a.p);
  const SectorHamiltonian h(SectorBasis(a.spins), a.p);
  const SchedulePoint pt{a.s, a.lambda};
  validate(pt);
  const BandedSymmetricOperator m = a.op == "H0" ? h.h0 : a.op == "VTF" ? h.vtf : a.op == "VAFF" ? h.vaff : h.at(pt);
  const io::RunHeader header = make_header(sub);
  Sink sink(a.common, "matrix_p" + std::to_string(a.p) + "_N" + std::to_string(a.spins));
  io::write_matrix_csv(sink.open(".csv"), header, m);
  if (!sink.to_stdout()) sink.report();
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App app("p-spin quantum annealing: mean-field phases, sector spectra and dynamics", "pspin");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  SliceArgs slice;
  auto* s = app.add_subcommand("slice", "phases and transitions along a constant-lambda line");
  s->add_option("--p", slice.p, "interaction order, or inf")->required();
  s->add_option("--lambda", slice.lambda)->required();
  s->add_option("--s-min", slice.s_min);
  s->add_option("--s-max", slice.s_max);
  s->add_option("--s-points", slice.s_points);
  s->add_option("--beta", slice.beta, "inverse temperature, or inf");
  s->add_option("--threshold", slice.threshold, "magnetization jump threshold");
  s->add_option("--refine", slice.refine, "bisection width");
  s->add_option("--seeds", slice.seeds, "F-branch seeds as mz:mx,mz:mx,...");
  add_common(s, slice.common, true);

  DiagramArgs diagram;
  auto* d = app.add_subcommand("phase-diagram", "phase labels on an (s, lambda) grid with boundaries");
  d->add_option("--p", diagram.p, "interaction order, or inf")->required();
  d->add_option("--s-min", diagram.grid.s_min);
  d->add_option("--s-max", diagram.grid.s_max);
  d->add_option("--s-points", diagram.grid.s_points);
  d->add_option("--lambda-min", diagram.grid.lambda_min);
  d->add_option("--lambda-max", diagram.grid.lambda_max);
  d->add_option("--lambda-points", diagram.grid.lambda_points);
  d->add_option("--refine", diagram.grid.refine_tolerance, "bisection width along grid edges");
  d->add_option("--threshold", diagram.grid.jump_threshold, "magnetization jump threshold");
  d->add_option("--seeds", diagram.seeds, "F-branch seeds as mz:mx,mz:mx,...");
  add_common(d, diagram.common, false);

  auto add_gap_options = [](CLI::App* sub, GapArgs& g, bool single_size) {
    sub->add_option("--p", g.p)->required();
    if (single_size) sub->add_option("--N", g.spins, "number of spins")->required();
    sub->add_option("--lambda", g.lambda)->required();
    sub->add_option("--s-min", g.s_min);
    sub->add_option("--s-max", g.s_max);
    sub->add_option("--s-points", g.s_points);
    sub->add_option("--refine-below", g.refine_below, "triple the grid where the gap is below this (0: off)");
    sub->add_option("--refine-tol", g.refine_tol, "s-tolerance of minimum refinement");
    add_common(sub, g.common, true);
  };

  GapArgs gap;
  auto* g = app.add_subcommand("gap", "gap E1 - E0 versus s and its local minima");
  add_gap_options(g, gap, true);
  g->add_option("--window-threshold", gap.window_threshold, "gap bound for the small-gap window");

  ScalingArgs scaling;
  auto* c = app.add_subcommand("scaling", "gap minima versus N with power and exponential fits");
  add_gap_options(c, scaling.gap, false);
  c->add_option("--N", scaling.sizes, "sizes as start:stop:step or a,b,c");
  c->add_option("--minimum", scaling.minimum)->check(CLI::IsMember({"global", "rightmost", "ordinal"}));
  c->add_option("--index", scaling.index, "1-based ordinal for --minimum ordinal");
  c->add_option("--model", scaling.model)->check(CLI::IsMember({"power", "exponential", "both"}));

  AnnealArgs anneal;
  auto* a = app.add_subcommand("anneal", "Schroedinger evolution along an annealing path");
  a->add_option("--p", anneal.p)->required();
  a->add_option("--N", anneal.spins, "number of spins")->required();
  a->add_option("--tau", anneal.tau, "total annealing time")->required();
  a->add_option("--dt", anneal.dt, "time step (0: default)");
  a->add_option("--lambda", anneal.lambda, "constant-lambda path (0,l) -> (s-turn,l) -> (1,1)");
  a->add_option("--s-turn", anneal.s_turn);
  a->add_option("--path", anneal.path, "explicit path s:lambda,s:lambda,...");
  a->add_option("--compare-lambda", anneal.compare_lambda, "second path for a comparison run");
  a->add_option("--compare-path", anneal.compare_path, "second explicit path");
  a->add_option("--series-stride", anneal.series_stride, "record the ground-state overlap every k steps");
  add_common(a, anneal.common, false);

  MatrixArgs matrix;
  auto* m = app.add_subcommand("matrix-dump", "band entries of an assembled operator as CSV triples");
  m->add_option("--p", matrix.p)->required();
  m->add_option("--N", matrix.spins, "number of spins")->required();
  m->add_option("--s", matrix.s);
  m->add_option("--lambda", matrix.lambda);
  m->add_option("--operator", matrix.op)->check(CLI::IsMember({"H", "H0", "VTF", "VAFF"}));
  add_common(m, matrix.common, false);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (s->parsed()) return cmd_slice(slice, s);
    if (d->parsed()) return cmd_phase_diagram(diagram, d);
    if (g->parsed()) return cmd_gap(gap, g);
    if (c->parsed()) return cmd_scaling(scaling, c);
    if (a->parsed()) return cmd_anneal(anneal, a);
    if (m->parsed()) return cmd_matrix_dump(matrix, m);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace pspin::cli
