#include "pspin/phase_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pspin {

double GridSpec::s_at(int i) const {
  return i == s_points - 1 ? s_max : s_min + (s_max - s_min) * i / (s_points - 1);
}

double GridSpec::lambda_at(int j) const {
  return j == lambda_points - 1 ? lambda_max : lambda_min + (lambda_max - lambda_min) * j / (lambda_points - 1);
}

void validate(const GridSpec& g) {
  if (g.s_points < 3 || g.lambda_points < 3) throw DomainError("phase diagram needs >= 2 cells per axis");
  if (!(g.s_min >= 0.0 && g.s_max <= 1.0 && g.s_min < g.s_max)) throw DomainError("s range must lie in [0,1]");
  if (!(g.lambda_min >= 0.0 && g.lambda_max <= 1.0 && g.lambda_min < g.lambda_max)) {
    throw DomainError("lambda range must lie in [0,1]");
  }
  if (!(g.refine_tolerance > 0.0)) throw DomainError("refine tolerance must be positive");
  if (!(g.jump_threshold > 0.0)) throw DomainError("jump threshold must be positive");
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::QP_F:
      return "QP-F";
    case BoundaryKind::F_F:
      return "F-F";
    case BoundaryKind::QP_QP2:
      return "QP-QP2";
    case BoundaryKind::QP2_F:
      return "QP2-F";
  }
  return "unknown";
}

std::string boundary_tag(BoundaryKind kind, TransitionOrder order) {
  return to_string(kind) + " " + to_string(order);
}

namespace {

BoundaryKind kind_of(Phase a, Phase b) {
  auto has = [&](Phase x) { return a == x || b == x; };
  if (a == Phase::F && b == Phase::F) return BoundaryKind::F_F;
  if (has(Phase::QP2) && has(Phase::F)) return BoundaryKind::QP2_F;
  if (has(Phase::QP) && has(Phase::QP2)) return BoundaryKind::QP_QP2;
  return BoundaryKind::QP_F;
}

void chain_polylines(PhaseDiagram& d) {
  const double ds = (d.grid.s_max - d.grid.s_min) / (d.grid.s_points - 1);
  const double dl = (d.grid.lambda_max - d.grid.lambda_min) / (d.grid.lambda_points - 1);
  const double link = 2.5 * std::max(ds, dl);

  std::vector<std::size_t> idx(d.points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& p = d.points[a];
    const auto& q = d.points[b];
    if (p.kind != q.kind) return p.kind < q.kind;
    if (p.order != q.order) return p.order < q.order;
    if (p.lambda != q.lambda) return p.lambda < q.lambda;
    return p.s < q.s;
  });

  std::vector<bool> used(d.points.size(), false);
  auto nearest = [&](const BoundaryPoint& from) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    double best_d = link;
    for (std::size_t k : idx) {
      const auto& q = d.points[k];
      if (used[k] || q.kind != from.kind || q.order != from.order) continue;
      const double dist = std::hypot(q.s - from.s, q.lambda - from.lambda);
      if (dist <= best_d) {
        best_d = dist;
        best = k;
      }
    }
    return best;
  };

  for (std::size_t start : idx) {
    if (used[start]) continue;
    used[start] = true;
    std::vector<std::size_t> chain{start};
    while (auto next = nearest(d.points[chain.back()])) {
      used[*next] = true;
      chain.push_back(*next);
    }
    while (auto prev = nearest(d.points[chain.front()])) {
      used[*prev] = true;
      chain.insert(chain.begin(), *prev);
    }
    Polyline line;
    line.kind = d.points[start].kind;
    line.order = d.points[start].order;
    for (std::size_t k : chain) line.vertices.push_back({d.points[k].s, d.points[k].lambda});
    d.boundaries.push_back(std::move(line));
  }
}

}  // namespace

PhaseDiagram scan(const InteractionOrder& order, const GridSpec& grid, int threads, const SolverOptions& solver) {
  validate(grid);
  if (!order.infinite && order.p < 3) throw DomainError("mean-field analysis requires p >= 3");
  PhaseDiagram d;
  d.order = order;
  d.grid = grid;
  const int ns = grid.s_points;
  const int nl = grid.lambda_points;
  d.cells.resize(static_cast<std::size_t>(ns) * nl);
  parallel_for(d.cells.size(), threads, [&](std::size_t k) {
    const int i = static_cast<int>(k % ns);
    const int j = static_cast<int>(k / ns);
    Cell& c = d.cells[k];
    c.s = grid.s_at(i);
    c.lambda = grid.lambda_at(j);
    c.solution = classify(order, {c.s, c.lambda}, solver);
  });
  for (const auto& c : d.cells) {
    if (!c.solution.converged) ++d.nonconverged;
  }

  const JumpOptions jump{grid.jump_threshold, grid.refine_tolerance, 1};
  std::vector<LineScan> rows(nl);
  std::vector<LineScan> cols(ns);
  parallel_for(static_cast<std::size_t>(nl + ns), threads, [&](std::size_t k) {
    if (k < static_cast<std::size_t>(nl)) {
      const int j = static_cast<int>(k);
      const double lambda = grid.lambda_at(j);
      std::vector<double> line(ns);
      std::vector<SaddleSolution> samples(ns);
      for (int i = 0; i < ns; ++i) {
        line[i] = grid.s_at(i);
        samples[i] = d.cell(i, j).solution;
      }
      rows[j] = locate_transitions([&](double s) { return classify(order, {s, lambda}, solver); }, line,
                                   std::move(samples), jump);
    } else {
      const int i = static_cast<int>(k) - nl;
      const double s = grid.s_at(i);
      std::vector<double> line(nl);
      std::vector<SaddleSolution> samples(nl);
      for (int j = 0; j < nl; ++j) {
        line[j] = grid.lambda_at(j);
        samples[j] = d.cell(i, j).solution;
      }
      // mz is undetermined on the lambda = 0 line, so the step from it to the
      // first positive row is not a phase boundary.
      const std::size_t skip = line.front() == 0.0 ? 1 : 0;
      line.erase(line.begin(), line.begin() + skip);
      samples.erase(samples.begin(), samples.begin() + skip);
      cols[i] = locate_transitions([&](double l) { return classify(order, {s, l}, solver); }, line,
                                   std::move(samples), jump);
    }
  });

  auto collect = [&](const LineScan& line, bool along_s, double fixed) {
    if (line.grid_too_coarse) d.grid_too_coarse = true;
    for (const auto& t : line.transitions) {
      BoundaryPoint b;
      b.s = along_s ? t.s : fixed;
      b.lambda = along_s ? fixed : t.s;
      b.kind = kind_of(t.before.phase, t.after.phase);
      b.order = t.order;
      b.d_mz = t.d_mz;
      b.d_mx = t.d_mx;
      b.along_s = along_s;
      d.points.push_back(b);
    }
  };
  for (int j = 0; j < nl; ++j) collect(rows[j], true, grid.lambda_at(j));
  for (int i = 0; i < ns; ++i) collect(cols[i], false, grid.s_at(i));

  chain_polylines(d);
  return d;
}

std::optional<double> measure_lambda_star(const PhaseDiagram& d) {
  std::optional<double> best;
  for (int j = 0; j < d.grid.lambda_points; ++j) {
    const double lambda = d.grid.lambda_at(j);
    if (lambda <= 0.0) continue;
    const bool first_order = std::any_of(d.points.begin(), d.points.end(), [&](const BoundaryPoint& b) {
      return b.along_s && b.lambda == lambda && b.order == TransitionOrder::First;
    });
    if (first_order) break;
    best = lambda;
  }
  return best;
}

// ---------------------------------------------------------------------------

AnnealPath::AnnealPath(std::vector<SchedulePoint> points) {
  if (points.empty()) throw DomainError("path needs at least one point");
  for (const auto& p : points) {
    validate(p);
    if (points_.empty() || !(points_.back() == p)) points_.push_back(p);
  }
  cumulative_.push_back(0.0);
  for (std::size_t k = 1; k < points_.size(); ++k) {
    const double len = std::hypot(points_[k].s - points_[k - 1].s, points_[k].lambda - points_[k - 1].lambda);
    cumulative_.push_back(cumulative_.back() + len);
  }
}

AnnealPath AnnealPath::constant_lambda(double lambda, double s_turn) {
  if (!(s_turn > 0.0 && s_turn <= 1.0)) throw DomainError("turning point must lie in (0,1]");
  return AnnealPath({{0.0, lambda}, {s_turn, lambda}, {1.0, 1.0}});
}

double AnnealPath::vertex_fraction(std::size_t k) const {
  if (length() == 0.0) return k == 0 ? 0.0 : 1.0;
  return k + 1 == points_.size() ? 1.0 : cumulative_[k] / length();
}

bool AnnealPath::spans_schedule() const {
  return points_.front().s == 0.0 && points_.back().s == 1.0 && points_.back().lambda == 1.0;
}

bool AnnealPath::monotone_s() const {
  for (std::size_t k = 1; k < points_.size(); ++k) {
    if (points_[k].s < points_[k - 1].s) return false;
  }
  return true;
}

bool AnnealPath::monotone_lambda() const {
  for (std::size_t k = 1; k < points_.size(); ++k) {
    if (points_[k].lambda < points_[k - 1].lambda) return false;
  }
  return true;
}

std::size_t AnnealPath::segment_of(double u) const {
  const double target = std::clamp(u, 0.0, 1.0) * length();
  std::size_t k = 0;
  while (k + 2 < points_.size() && target >= cumulative_[k + 1]) ++k;
  return k;
}

SchedulePoint AnnealPath::at(double u) const {
  if (points_.size() == 1 || length() == 0.0) return points_.front();
  if (u >= 1.0) return points_.back();
  if (u <= 0.0) return points_.front();
  const std::size_t k = segment_of(u);
  const double seg = cumulative_[k + 1] - cumulative_[k];
  const double t = std::clamp((u * length() - cumulative_[k]) / seg, 0.0, 1.0);
  const auto& a = points_[k];
  const auto& b = points_[k + 1];
  return {std::clamp(a.s + t * (b.s - a.s), 0.0, 1.0), std::clamp(a.lambda + t * (b.lambda - a.lambda), 0.0, 1.0)};
}

std::pair<double, double> AnnealPath::velocity(double u) const {
  if (points_.size() == 1 || length() == 0.0) return {0.0, 0.0};
  const std::size_t k = segment_of(u);
  const double seg = cumulative_[k + 1] - cumulative_[k];
  const double scale = length() / seg;
  return {(points_[k + 1].s - points_[k].s) * scale, (points_[k + 1].lambda - points_[k].lambda) * scale};
}

std::string AnnealPath::describe() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (k > 0) os << " -> ";
    os << "(" << points_[k].s << "," << points_[k].lambda << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

struct Vec2 {
  double x;
  double y;
};

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Closed-segment intersection; touching counts. Returns the contact point.
std::optional<Vec2> intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  constexpr double eps = 1e-14;
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
    return std::min(a.x, b.x) - eps <= c.x && c.x <= std::max(a.x, b.x) + eps && std::min(a.y, b.y) - eps <= c.y &&
           c.y <= std::max(a.y, b.y) + eps;
  };
  const bool proper = ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
                      ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
  if (proper) {
    const double t = d1 / (d1 - d2);
    return Vec2{p1.x + t * (p2.x - p1.x), p1.y + t * (p2.y - p1.y)};
  }
  if (std::abs(d3) <= eps && on_segment(p1, p2, q1)) return q1;
  if (std::abs(d4) <= eps && on_segment(p1, p2, q2)) return q2;
  if (std::abs(d1) <= eps && on_segment(q1, q2, p1)) return p1;
  if (std::abs(d2) <= eps && on_segment(q1, q2, p2)) return p2;
  return std::nullopt;
}

}  // namespace

PathSafety path_is_safe(const AnnealPath& path, const PhaseDiagram& diagram) {
  PathSafety out;
  const auto& pts = path.points();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (pts[k].lambda == 0.0 && pts[k + 1].lambda == 0.0) out.degenerate_segments.push_back(k);
  }
  if (pts.size() == 1 && pts[0].lambda == 0.0) out.degenerate_segments.push_back(0);

  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Vec2 a{pts[k].s, pts[k].lambda};
    const Vec2 b{pts[k + 1].s, pts[k + 1].lambda};
    for (const auto& line : diagram.boundaries) {
      if (line.order != TransitionOrder::First) continue;
      const auto& v = line.vertices;
      for (std::size_t m = 0; m < v.size(); ++m) {
        const Vec2 q1{v[m].s, v[m].lambda};
        const Vec2 q2 = m + 1 < v.size() ? Vec2{v[m + 1].s, v[m + 1].lambda} : q1;
        if (m + 1 == v.size() && v.size() > 1) break;
        const auto hit = intersect(a, b, q1, q2);
        if (!hit) continue;
        const bool seen = std::any_of(out.crossings.begin(), out.crossings.end(), [&](const PathCrossing& c) {
          return c.path_segment == k && c.kind == line.kind && std::hypot(c.at.s - hit->x, c.at.lambda - hit->y) < 1e-9;
        });
        if (seen) continue;
        out.crossings.push_back({{hit->x, hit->y}, line.kind, line.order, k});
      }
    }
  }
  out.safe = out.crossings.empty();
  return out;
}

}  // namespace pspin
