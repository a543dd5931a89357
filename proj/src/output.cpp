#include "pspin/output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace pspin::io {

using Json = nlohmann::ordered_json;

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json header_json(const RunHeader& h) {
  Json config = Json::object();
  for (const auto& [k, v] : h.config) config[k] = v;
  return Json{{"artifact", "pspin"}, {"version", kVersion}, {"command", h.command}, {"config", config}};
}

void dump(std::ostream& os, const RunHeader& header, Json body) {
  Json doc = Json::object();
  doc["header"] = header_json(header);
  for (auto& [k, v] : body.items()) doc[k] = v;
  os << doc.dump(2) << '\n';
}

Json label_json(const PhaseLabel& l) { return to_string(l); }

Json transition_json(const Transition& t) {
  return Json{{"s", number(t.s)},     {"order", to_string(t.order)},  {"d_mz", number(t.d_mz)},
              {"d_mx", number(t.d_mx)}, {"before", label_json(t.before)}, {"after", label_json(t.after)}};
}

std::vector<std::string> solution_row(const std::string& p, double s, double lambda, const SaddleSolution& sol) {
  return {p,
          format_number(s),
          format_number(lambda),
          format_number(sol.m.mz),
          format_number(sol.m.mx),
          format_number(sol.free_energy),
          to_string(sol.label),
          sol.converged ? "1" : "0"};
}

const std::vector<std::string> kSolutionColumns = {"p", "s", "lambda", "mz", "mx", "f", "phase", "converged"};

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_csv(std::ostream& os, const RunHeader& header, std::span<const std::string> columns,
               const std::vector<std::vector<std::string>>& rows) {
  os << "# pspin " << kVersion << '\n';
  os << "# command=" << header.command << '\n';
  for (const auto& [k, v] : header.config) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void write_slice_csv(std::ostream& os, const RunHeader& header, const InteractionOrder& order, double lambda,
                     const LineScan& scan) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    rows.push_back(solution_row(order.to_string(), scan.grid[i], lambda, scan.samples[i]));
  }
  write_csv(os, header, kSolutionColumns, rows);
}

void write_transitions_csv(std::ostream& os, const RunHeader& header, std::span<const Transition> transitions) {
  static const std::vector<std::string> cols = {"s", "order", "d_mz", "d_mx", "before", "after"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : transitions) {
    rows.push_back({format_number(t.s), to_string(t.order), format_number(t.d_mz), format_number(t.d_mx),
                    to_string(t.before), to_string(t.after)});
  }
  write_csv(os, header, cols, rows);
}

void write_slice_json(std::ostream& os, const RunHeader& header, const InteractionOrder& order, double lambda,
                      const SliceScan& scan) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    const auto& sol = scan.samples[i];
    samples.push_back(Json{{"s", number(scan.grid[i])},
                           {"mz", number(sol.m.mz)},
                           {"mx", number(sol.m.mx)},
                           {"f", number(sol.free_energy)},
                           {"phase", label_json(sol.label)},
                           {"converged", sol.converged}});
  }
  Json transitions = Json::array();
  for (const auto& t : scan.transitions) transitions.push_back(transition_json(t));
  dump(os, header,
       Json{{"p", order.to_string()},
            {"lambda", number(lambda)},
            {"degenerate_line", scan.degenerate_line},
            {"even_order", !order.infinite && order.p % 2 == 0},
            {"grid_too_coarse", scan.grid_too_coarse},
            {"nonconverged", scan.nonconverged},
            {"transitions", transitions},
            {"samples", samples}});
}

void write_cells_csv(std::ostream& os, const RunHeader& header, const PhaseDiagram& d) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(d.cells.size());
  for (const auto& c : d.cells) rows.push_back(solution_row(d.order.to_string(), c.s, c.lambda, c.solution));
  write_csv(os, header, kSolutionColumns, rows);
}

void write_boundaries_json(std::ostream& os, const RunHeader& header, const PhaseDiagram& d) {
  Json points = Json::array();
  for (const auto& b : d.points) {
    points.push_back(Json{{"s", number(b.s)},
                          {"lambda", number(b.lambda)},
                          {"tag", boundary_tag(b.kind, b.order)},
                          {"d_mz", number(b.d_mz)},
                          {"d_mx", number(b.d_mx)},
                          {"refined_along", b.along_s ? "s" : "lambda"}});
  }
  Json lines = Json::array();
  for (const auto& l : d.boundaries) {
    Json v = Json::array();
    for (const auto& p : l.vertices) v.push_back(Json::array({number(p.s), number(p.lambda)}));
    lines.push_back(Json{{"tag", boundary_tag(l.kind, l.order)}, {"vertices", v}});
  }
  const auto star = measure_lambda_star(d);
  dump(os, header,
       Json{{"p", d.order.to_string()},
            {"s_points", d.grid.s_points},
            {"lambda_points", d.grid.lambda_points},
            {"nonconverged", d.nonconverged},
            {"grid_too_coarse", d.grid_too_coarse},
            {"lambda_star", star ? number(*star) : Json(nullptr)},
            {"polylines", lines},
            {"points", points}});
}

void write_gap_csv(std::ostream& os, const RunHeader& header, const GapCurve& curve) {
  static const std::vector<std::string> cols = {"s", "delta"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(curve.samples.size());
  for (const auto& x : curve.samples) rows.push_back({format_number(x.s), format_number(x.delta)});
  write_csv(os, header, cols, rows);
}

void write_minima_csv(std::ostream& os, const RunHeader& header, std::span<const GapMinimum> minima) {
  static const std::vector<std::string> cols = {"N", "index", "s_star", "delta"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : minima) {
    rows.push_back({std::to_string(m.spins), std::to_string(m.index), format_number(m.s_star), format_number(m.delta)});
  }
  write_csv(os, header, cols, rows);
}

namespace {

Json minima_json(std::span<const GapMinimum> minima) {
  Json out = Json::array();
  for (const auto& m : minima) {
    out.push_back(Json{{"N", m.spins}, {"index", m.index}, {"s_star", number(m.s_star)}, {"delta", number(m.delta)}});
  }
  return out;
}

Json fits_json(std::span<const ScalingFit> fits) {
  Json out = Json::array();
  for (const auto& f : fits) {
    out.push_back(Json{{"model", to_string(f.model)},
                       {"a", number(f.a)},
                       {f.model == ScalingModel::Power ? "b" : "c", number(f.exponent)},
                       {"r_squared", number(f.r_squared)},
                       {"n_min", f.n_min},
                       {"n_max", f.n_max},
                       {"sizes", f.sizes}});
  }
  return out;
}

}  // namespace

void write_gap_json(std::ostream& os, const RunHeader& header, const GapCurve& curve,
                    std::span<const GapMinimum> minima, const SmallGapWindow& window) {
  Json samples = Json::array();
  for (const auto& x : curve.samples) samples.push_back(Json::array({number(x.s), number(x.delta)}));
  Json win = window.found ? Json{{"left", number(window.left)}, {"right", number(window.right)}, {"minima", window.minima}}
                          : Json(nullptr);
  dump(os, header,
       Json{{"p", curve.p},
            {"N", curve.spins},
            {"lambda", number(curve.lambda)},
            {"even_order", curve.p % 2 == 0},
            {"near_degenerate", curve.near_degenerate},
            {"small_gap_window", win},
            {"minima", minima_json(minima)},
            {"samples", samples}});
}

void write_fits_csv(std::ostream& os, const RunHeader& header, std::span<const ScalingFit> fits) {
  static const std::vector<std::string> cols = {"model", "a", "exponent", "r_squared", "n_min", "n_max", "sizes"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : fits) {
    rows.push_back({to_string(f.model), format_number(f.a), format_number(f.exponent), format_number(f.r_squared),
                    std::to_string(f.n_min), std::to_string(f.n_max), std::to_string(f.sizes)});
  }
  write_csv(os, header, cols, rows);
}

void write_scaling_json(std::ostream& os, const RunHeader& header, std::span<const GapMinimum> selected,
                        std::span<const ScalingFit> fits) {
  dump(os, header, Json{{"fits", fits_json(fits)}, {"minima", minima_json(selected)}});
}

void write_runs_json(std::ostream& os, const RunHeader& header, std::span<const AnnealRun> runs) {
  Json out = Json::array();
  for (const auto& r : runs) {
    Json pts = Json::array();
    for (const auto& p : r.path.points()) pts.push_back(Json::array({number(p.s), number(p.lambda)}));
    out.push_back(Json{{"path", pts},
                       {"spans_schedule", r.path.spans_schedule()},
                       {"monotone_s", r.path.monotone_s()},
                       {"monotone_lambda", r.path.monotone_lambda()},
                       {"p", r.p},
                       {"N", r.spins},
                       {"tau", number(r.tau)},
                       {"dt", number(r.dt)},
                       {"steps", r.steps},
                       {"fidelity", number(r.fidelity)},
                       {"residual_energy", number(r.residual_energy)},
                       {"norm_drift", number(r.norm_drift)}});
  }
  dump(os, header, Json{{"runs", out}});
}

void write_series_csv(std::ostream& os, const RunHeader& header, const AnnealRun& run) {
  static const std::vector<std::string> cols = {"t", "s", "lambda", "ground_overlap"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& x : run.series) {
    rows.push_back({format_number(x.t), format_number(x.point.s), format_number(x.point.lambda),
                    format_number(x.ground_overlap)});
  }
  write_csv(os, header, cols, rows);
}

void write_matrix_csv(std::ostream& os, const RunHeader& header, const BandedSymmetricOperator& op) {
  static const std::vector<std::string> cols = {"row", "col", "value"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : entries(op)) rows.push_back({std::to_string(e.row), std::to_string(e.col), format_number(e.value)});
  write_csv(os, header, cols, rows);
}

}  // namespace pspin::io
