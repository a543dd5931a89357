#include "pspin/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pspin {

namespace {

constexpr double kFerroThreshold = 1e-9;
constexpr double kTieTolerance = 1e-12;
constexpr double kOrderTolerance = 1e-13;

void require_order(int p) {
  if (p < 3) throw DomainError("mean-field analysis requires p >= 3");
}

struct Fields {
  double a;
  double b;
  double r;
};

Fields fields(int p, const SchedulePoint& pt, const Magnetization& m) {
  const double a = p * pt.s * pt.lambda * std::pow(m.mz, p - 1);
  const double b = 1.0 - pt.s - 2.0 * pt.s * (1.0 - pt.lambda) * m.mx;
  return {a, b, std::hypot(a, b)};
}

// h(r) = tanh(beta r) / r (or 1/r at zero temperature) and its derivative.
struct Gain {
  double h;
  double dh;
};

Gain gain(InverseTemperature beta, double r) {
  if (beta.is_infinite()) return {1.0 / r, -1.0 / (r * r)};
  const double b = beta.value();
  const double x = b * r;
  if (x < 1e-4) return {b * (1.0 - x * x / 3.0), -2.0 / 3.0 * b * b * b * r};
  const double t = std::tanh(x);
  return {t / r, (b * (1.0 - t * t) * r - t) / (r * r)};
}

// Self-consistent map T(m). Undefined when r vanishes at zero temperature.
std::optional<Magnetization> apply_map(int p, const SchedulePoint& pt, InverseTemperature beta,
                                       const Magnetization& m) {
  const Fields f = fields(p, pt, m);
  if (f.r == 0.0) {
    if (beta.is_infinite()) return std::nullopt;
    return Magnetization{0.0, 0.0};
  }
  const double h = gain(beta, f.r).h;
  return Magnetization{f.a * h, f.b * h};
}

double max_norm(const Magnetization& u, const Magnetization& v) {
  return std::max(std::abs(u.mz - v.mz), std::abs(u.mx - v.mx));
}

Magnetization clamp_unit(Magnetization m) {
  return {std::clamp(m.mz, -1.0, 1.0), std::clamp(m.mx, -1.0, 1.0)};
}

// One Newton step on G(m) = T(m) - m with the analytic Jacobian.
std::optional<Magnetization> newton_step(int p, const SchedulePoint& pt, InverseTemperature beta,
                                         const Magnetization& m, const Magnetization& t) {
  const Fields f = fields(p, pt, m);
  if (f.r == 0.0) return std::nullopt;
  const auto [h, dh] = gain(beta, f.r);
  const double a_z = p * (p - 1) * pt.s * pt.lambda * std::pow(m.mz, p - 2);
  const double b_x = -2.0 * pt.s * (1.0 - pt.lambda);
  const double r_z = f.a * a_z / f.r;
  const double r_x = f.b * b_x / f.r;
  const double j11 = a_z * h + f.a * dh * r_z - 1.0;
  const double j12 = f.a * dh * r_x;
  const double j21 = f.b * dh * r_z;
  const double j22 = b_x * h + f.b * dh * r_x - 1.0;
  const double det = j11 * j22 - j12 * j21;
  if (!std::isfinite(det) || std::abs(det) < 1e-300) return std::nullopt;
  const double g1 = t.mz - m.mz;
  const double g2 = t.mx - m.mx;
  const double dz = (-g1 * j22 + g2 * j12) / det;
  const double dx = (-g2 * j11 + g1 * j21) / det;
  return clamp_unit({m.mz + dz, m.mx + dx});
}

// Sign changes of the zero-temperature F equation on the unit circle,
// mz = sin(theta), mx = cos(theta):
//   cos(theta) (p s lambda sin^(p-2)(theta) + 2 s (1-lambda)) = 1 - s.
std::vector<Magnetization> circle_roots(int p, const SchedulePoint& pt, int cells) {
  std::vector<Magnetization> roots;
  const double drive = p * pt.s * pt.lambda;
  const double aff = 2.0 * pt.s * (1.0 - pt.lambda);
  auto phi = [&](double theta) {
    return std::cos(theta) * (drive * std::pow(std::sin(theta), p - 2) + aff) - (1.0 - pt.s);
  };
  const double step = 0.5 * std::numbers::pi / cells;
  double lo = 0.0;
  double f_lo = phi(lo);
  for (int k = 1; k <= cells; ++k) {
    const double hi = k * step;
    const double f_hi = phi(hi);
    if (f_hi == 0.0) {
      roots.push_back({std::sin(hi), std::cos(hi)});
    } else if (f_lo * f_hi < 0.0) {
      double a = lo;
      double b = hi;
      double fa = f_lo;
      for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = phi(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      const double theta = 0.5 * (a + b);
      roots.push_back({std::sin(theta), std::cos(theta)});
    }
    lo = hi;
    f_lo = f_hi;
  }
  return roots;
}

int phase_priority(Phase phase) {
  switch (phase) {
    case Phase::F:
      return 0;
    case Phase::QP2:
      return 1;
    case Phase::QP:
      return 2;
    case Phase::Unresolved:
      break;
  }
  return 3;
}

// Lowest free energy wins; numerically tied candidates resolve towards F.
const SaddleSolution* select_stable(const std::vector<SaddleSolution>& candidates) {
  const SaddleSolution* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.converged) continue;
    if (best == nullptr) {
      best = &c;
      continue;
    }
    const double diff = c.free_energy - best->free_energy;
    if (diff < -kTieTolerance ||
        (std::abs(diff) <= kTieTolerance && phase_priority(c.label.phase) < phase_priority(best->label.phase))) {
      best = &c;
    }
  }
  return best;
}

void add_unique(std::vector<SaddleSolution>& list, SaddleSolution sol) {
  for (const auto& other : list) {
    if (max_norm(other.m, sol.m) < 1e-8 && other.label.phase == sol.label.phase) return;
  }
  list.push_back(std::move(sol));
}

// (s, lambda) = (1, 0) is pure V_AFF. Only the s -> 1 limit of the QP2
// branch (mx = 0, f = 0) remains.
SaddleSolution corner_solution() {
  SaddleSolution corner;
  corner.m = {0.0, 0.0};
  corner.free_energy = 0.0;
  corner.converged = true;
  corner.label = {Phase::QP2, FerroBranch::None};
  return corner;
}

}  // namespace

InverseTemperature InverseTemperature::finite(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("inverse temperature must be positive");
  return InverseTemperature(beta, false);
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::QP:
      return "QP";
    case Phase::QP2:
      return "QP2";
    case Phase::F:
      return "F";
    case Phase::Unresolved:
      break;
  }
  return "unresolved";
}

std::string to_string(const PhaseLabel& label) {
  if (label.phase != Phase::F) return to_string(label.phase);
  switch (label.branch) {
    case FerroBranch::Upper:
      return "F_upper";
    case FerroBranch::Lower:
      return "F_lower";
    case FerroBranch::None:
      break;
  }
  return "F";
}

std::string to_string(TransitionOrder order) { return order == TransitionOrder::First ? "first" : "second"; }

double free_energy(int p, const SchedulePoint& point, InverseTemperature beta, const Magnetization& m) {
  require_order(p);
  validate(point);
  const Fields f = fields(p, point, m);
  const double s = point.s;
  const double l = point.lambda;
  const double base = (p - 1) * s * l * std::pow(m.mz, p) - s * (1.0 - l) * m.mx * m.mx;
  if (beta.is_infinite()) return base - f.r;
  // ln 2cosh(x) = x + ln(1 + exp(-2x)) for x >= 0
  const double x = beta.value() * f.r;
  return base - f.r - std::log1p(std::exp(-2.0 * x)) / beta.value();
}

double saddle_residual(int p, const SchedulePoint& point, InverseTemperature beta, const Magnetization& m) {
  require_order(p);
  const auto t = apply_map(p, point, beta, m);
  if (!t) return std::numeric_limits<double>::infinity();
  return max_norm(*t, m);
}

SaddleSolution solve_saddle(int p, const SchedulePoint& point, InverseTemperature beta, const Magnetization& seed,
                            const SolverOptions& options) {
  require_order(p);
  validate(point);
  if (std::abs(seed.mz) > 1.0 || std::abs(seed.mx) > 1.0) throw DomainError("seed outside [-1,1]^2");

  SaddleSolution out;
  Magnetization m = seed;
  double residual = std::numeric_limits<double>::infinity();
  double checkpoint = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const auto t = apply_map(p, point, beta, m);
    if (!t) break;
    residual = max_norm(*t, m);
    if (residual < options.tolerance) {
      out.converged = true;
      break;
    }
    if (options.stall_window > 0 && it % options.stall_window == 0) {
      if (it > 0 && !(residual < 0.1 * checkpoint)) break;
      checkpoint = residual;
    }
    if (residual < 1e-3) {
      if (auto next = newton_step(p, point, beta, m, *t)) {
        const double r_next = saddle_residual(p, point, beta, *next);
        if (r_next < residual) {
          m = *next;
          continue;
        }
      }
    }
    m = {(1.0 - options.damping) * m.mz + options.damping * t->mz,
         (1.0 - options.damping) * m.mx + options.damping * t->mx};
  }
  out.m = m;
  out.iterations = it;
  out.residual = residual;
  out.free_energy = free_energy(p, point, beta, m);
  out.label = label_solution(p, point, m);
  return out;
}

double qp2_lower_edge(double lambda) { return 1.0 / (3.0 - 2.0 * lambda); }

bool in_qp_domain(const SchedulePoint& point) { return point.s < qp2_lower_edge(point.lambda); }

bool in_qp2_domain(const SchedulePoint& point) {
  return point.lambda < 1.0 && point.s < 1.0 && point.s >= qp2_lower_edge(point.lambda);
}

double f_qp(const SchedulePoint& point) {
  validate(point);
  if (!in_qp_domain(point)) throw DomainError("QP solution requires s < 1/(3 - 2 lambda)");
  return -point.s * point.lambda + 2.0 * point.s - 1.0;
}

double f_qp2(const SchedulePoint& point) {
  validate(point);
  if (!in_qp2_domain(point)) throw DomainError("QP2 solution requires 1/(3 - 2 lambda) <= s < 1 and lambda < 1");
  const double s = point.s;
  return -(1.0 - s) * (1.0 - s) / (4.0 * s * (1.0 - point.lambda));
}

Magnetization qp2_magnetization(const SchedulePoint& point) {
  validate(point);
  if (!in_qp2_domain(point)) throw DomainError("QP2 solution requires 1/(3 - 2 lambda) <= s < 1 and lambda < 1");
  return {0.0, (1.0 - point.s) / (2.0 * point.s * (1.0 - point.lambda))};
}

PhaseLabel label_solution(int p, const SchedulePoint& point, const Magnetization& m) {
  if (m.mz > kFerroThreshold) {
    const double h0_field = p * point.s * point.lambda * std::pow(m.mz, p - 2);
    const double aff_field = 2.0 * point.s * (1.0 - point.lambda);
    return {Phase::F, h0_field >= aff_field ? FerroBranch::Upper : FerroBranch::Lower};
  }
  if (m.mx > 1.0 - 1e-9) return {Phase::QP, FerroBranch::None};
  if (in_qp2_domain(point) && std::abs(m.mx - qp2_magnetization(point).mx) < 1e-6) {
    return {Phase::QP2, FerroBranch::None};
  }
  return {Phase::QP, FerroBranch::None};
}

Classification classify_phase(int p, const SchedulePoint& point, InverseTemperature beta,
                              const SolverOptions& options) {
  require_order(p);
  validate(point);
  Classification out;
  out.degenerate_line = point.lambda == 0.0;
  out.even_order = p % 2 == 0;

  auto& cands = out.candidates;
  if (beta.is_infinite()) {
    if (in_qp_domain(point)) {
      SaddleSolution qp;
      qp.m = {0.0, 1.0};
      qp.free_energy = f_qp(point);
      qp.residual = saddle_residual(p, point, beta, qp.m);
      qp.converged = true;
      qp.label = {Phase::QP, FerroBranch::None};
      cands.push_back(qp);
    }
    if (in_qp2_domain(point)) {
      SaddleSolution qp2;
      qp2.m = qp2_magnetization(point);
      qp2.free_energy = f_qp2(point);
      qp2.converged = true;
      // At the lower domain edge QP2 coincides with QP.
      qp2.label = {qp2.m.mx > 1.0 - 1e-9 ? Phase::QP : Phase::QP2, FerroBranch::None};
      cands.push_back(qp2);
    }
    if (point.s > 0.0 && point.lambda > 0.0) {
      auto keep = [&](SaddleSolution sol) {
        if (sol.converged && sol.m.mz > kFerroThreshold && sol.m.mx > -kFerroThreshold) {
          add_unique(cands, std::move(sol));
        }
      };
      for (const auto& seed : options.seeds) keep(solve_saddle(p, point, beta, seed, options));
      if (options.bracket_seeds) {
        for (const auto& root : circle_roots(p, point, options.bracket_cells)) {
          // A bracketed root solves the equations exactly. When r is tiny the
          // map (a, b)/r cannot reproduce it to the tolerance, so the residual
          // is then measured as |(a, b) - r m| instead.
          SaddleSolution sol;
          sol.m = root;
          sol.residual = saddle_residual(p, point, beta, root);
          if (!(sol.residual < options.tolerance)) {
            const Fields f = fields(p, point, root);
            sol.residual = std::max(std::abs(f.a - f.r * root.mz), std::abs(f.b - f.r * root.mx));
          }
          sol.converged = sol.residual < options.tolerance;
          sol.free_energy = free_energy(p, point, beta, root);
          sol.label = label_solution(p, point, root);
          keep(std::move(sol));
        }
      }
    }
    if (cands.empty() && point.s == 1.0 && point.lambda == 0.0) cands.push_back(corner_solution());
  } else {
    std::vector<Magnetization> seeds = options.seeds;
    seeds.push_back({0.0, 1.0});
    for (const auto& seed : seeds) {
      SaddleSolution sol = solve_saddle(p, point, beta, seed, options);
      if (sol.converged && sol.m.mz > -kFerroThreshold) add_unique(cands, std::move(sol));
    }
  }

  if (const SaddleSolution* best = select_stable(cands)) {
    out.stable = *best;
  } else {
    out.stable.converged = false;
    out.stable.label = {Phase::Unresolved, FerroBranch::None};
  }
  return out;
}

// ---------------------------------------------------------------------------

InfinitePFreeEnergies pinf_free_energies(const SchedulePoint& point) {
  validate(point);
  InfinitePFreeEnergies out;
  out.f_f = -point.s * point.lambda;
  if (in_qp_domain(point)) out.f_qp = f_qp(point);
  if (in_qp2_domain(point)) {
    out.f_qp2 = f_qp2(point);
    const double mx = qp2_magnetization(point).mx;
    out.mz_lower = std::sqrt(std::max(0.0, 1.0 - mx * mx));
  }
  return out;
}

SaddleSolution classify_infinite_p(const SchedulePoint& point) {
  const auto f = pinf_free_energies(point);
  if (point.s == 1.0 && point.lambda == 0.0) return corner_solution();
  std::vector<SaddleSolution> cands;
  if (f.f_qp) {
    SaddleSolution qp;
    qp.m = {0.0, 1.0};
    qp.free_energy = *f.f_qp;
    qp.converged = true;
    qp.label = {Phase::QP, FerroBranch::None};
    cands.push_back(qp);
  }
  {
    SaddleSolution upper;
    upper.m = {1.0, 0.0};
    upper.free_energy = f.f_f;
    upper.converged = true;
    upper.label = {Phase::F, FerroBranch::Upper};
    cands.push_back(upper);
  }
  if (f.f_qp2) {
    SaddleSolution lower;
    const double mx = qp2_magnetization(point).mx;
    lower.free_energy = *f.f_qp2;
    lower.converged = true;
    if (point.lambda > 0.0) {
      lower.m = {*f.mz_lower, mx};
      lower.label = {Phase::F, FerroBranch::Lower};
    } else {
      lower.m = {0.0, mx};
      lower.label = {mx > 1.0 - 1e-9 ? Phase::QP : Phase::QP2, FerroBranch::None};
    }
    cands.push_back(lower);
  }
  return *select_stable(cands);
}

double pinf_second_order_boundary(double lambda) {
  if (lambda < 0.0 || lambda > 0.5) throw DomainError("second-order boundary defined for lambda <= 1/2");
  return qp2_lower_edge(lambda);
}

double pinf_first_order_boundary() { return 0.5; }

double pinf_ff_boundary(double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw DomainError("lambda outside [0,1]");
  // Equal to 1 / (sqrt(lambda) + sqrt(1 - lambda))^2, which stays finite at lambda = 1/2.
  const double root = std::sqrt(lambda) + std::sqrt(1.0 - lambda);
  return 1.0 / (root * root);
}

SaddleSolution classify(const InteractionOrder& order, const SchedulePoint& point, const SolverOptions& options) {
  if (order.infinite) return classify_infinite_p(point);
  return classify_phase(order.p, point, InverseTemperature::infinite(), options).stable;
}

// ---------------------------------------------------------------------------

namespace {

double jump(const SaddleSolution& a, const SaddleSolution& b) { return max_norm(a.m, b.m); }

}  // namespace

LineScan locate_transitions(const LineClassifier& at, std::span<const double> grid,
                            std::vector<SaddleSolution> samples, const JumpOptions& options) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
  }
  LineScan out;
  out.grid.assign(grid.begin(), grid.end());
  if (samples.empty()) {
    samples.resize(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) { samples[i] = at(grid[i]); });
  } else if (samples.size() != grid.size()) {
    throw DomainError("sample count does not match grid");
  }
  for (const auto& s : samples) {
    if (!s.converged) ++out.nonconverged;
  }

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    SaddleSolution left = samples[i];
    SaddleSolution right = samples[i + 1];
    if (!left.converged || !right.converged) continue;
    if (left.label.phase == right.label.phase && jump(left, right) <= options.threshold) continue;

    double a = grid[i];
    double b = grid[i + 1];
    auto bisect = [&](double tol) {
      while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) break;
        const SaddleSolution m = at(mid);
        if (!m.converged) break;
        const bool left_change = left.label.phase != m.label.phase;
        const bool right_change = m.label.phase != right.label.phase;
        if (left_change && right_change) out.grid_too_coarse = true;
        bool go_left;
        if (left_change || right_change) {
          go_left = left_change;
        } else {
          go_left = jump(left, m) >= jump(m, right);
        }
        if (go_left) {
          b = mid;
          right = m;
        } else {
          a = mid;
          left = m;
        }
      }
    };
    bisect(options.refine_tolerance);
    const double located = 0.5 * (a + b);
    const bool phase_change = left.label.phase != right.label.phase;
    // Square-root onsets still show a visible jump at the location tolerance;
    // only a jump that survives a much narrower bracket counts as first order.
    if (jump(left, right) > options.threshold) bisect(kOrderTolerance);
    const double d = jump(left, right);
    if (d <= options.threshold && !phase_change) continue;

    Transition t;
    t.s = located;
    t.d_mz = right.m.mz - left.m.mz;
    t.d_mx = right.m.mx - left.m.mx;
    t.order = d > options.threshold ? TransitionOrder::First : TransitionOrder::Second;
    t.before = left.label;
    t.after = right.label;
    out.transitions.push_back(t);
  }
  out.samples = std::move(samples);
  return out;
}

SliceScan detect_jump(const InteractionOrder& order, double lambda, std::span<const double> s_grid,
                      const JumpOptions& options, const SolverOptions& solver) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda outside [0,1]");
  if (s_grid.size() < 2) throw DomainError("slice grid needs at least two points");
  for (double s : s_grid) {
    if (!(s >= 0.0 && s < 1.0)) throw DomainError("slice grid must lie within [0,1)");
  }
  if (!order.infinite) require_order(order.p);
  auto at = [&](double s) { return classify(order, {s, lambda}, solver); };
  SliceScan out;
  static_cast<LineScan&>(out) = locate_transitions(at, s_grid, {}, options);
  out.degenerate_line = lambda == 0.0;
  return out;
}

SliceScan detect_jump(int p, double lambda, std::span<const double> s_grid, const JumpOptions& options,
                      const SolverOptions& solver) {
  return detect_jump(InteractionOrder::finite(p), lambda, s_grid, options, solver);
}


}  // namespace pspin
