#include "pspin/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace pspin {

LowestPair lowest_two(const BandedSymmetricOperator& op) {
  const int n = op.dim();
  if (n < 2) throw DomainError("lowest_two requires dimension >= 2");
  if (!op.all_finite()) throw NumericalError("operator has non-finite entries");
  const int kd = std::min(op.half_bandwidth(), n - 1);
  const int ldab = kd + 1;
  // Column-major upper band storage: ab[(kd + i - j) + j * ldab] = A(i, j), i <= j.
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - kd); i <= j; ++i) ab[(kd + i - j) + static_cast<std::size_t>(j) * ldab] = op(i, j);
  }
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  double q = 0.0;
  double z = 0.0;
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, ab.data(), ldab, &q, 1, 0.0, 0.0,
                                         1, 2, abstol, &found, w.data(), &z, 1, ifail.data());
  if (info != 0 || found != 2) {
    throw NumericalError("banded eigensolver failed (info=" + std::to_string(info) + ", dim=" + std::to_string(n) +
                         ")");
  }
  return {w[0], w[1]};
}

std::vector<double> default_gap_grid() { return uniform_grid(0.0, 1.0, 2001); }

double gap_at(const SectorHamiltonian& h, double s, double lambda) { return lowest_two(h.at({s, lambda})).gap(); }

namespace {

void check_curve_inputs(int p, int spins, double lambda, std::span<const double> s_grid) {
  validate(ModelParams{p, spins});
  if (spins > kMaxSpins) throw DomainError("N exceeds the supported maximum of " + std::to_string(kMaxSpins));
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda outside [0,1]");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] >= 0.0 && s_grid[i] <= 1.0)) throw DomainError("s grid outside [0,1]");
    if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw DomainError("s grid must be strictly increasing");
  }
}

std::vector<double> evaluate(const SectorHamiltonian& h, double lambda, std::span<const double> s, int threads) {
  std::vector<double> out(s.size());
  std::vector<std::string> errors(s.size());
  parallel_for(s.size(), threads, [&](std::size_t i) {
    try {
      out[i] = gap_at(h, s[i], lambda);
    } catch (const NumericalError& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!errors[i].empty()) throw NumericalError(errors[i] + " at s=" + std::to_string(s[i]));
  }
  return out;
}

}  // namespace

GapCurve gap_curve(int p, int spins, double lambda, std::span<const double> s_grid, const GapOptions& options) {
  check_curve_inputs(p, spins, lambda, s_grid);
  const SectorHamiltonian h(SectorBasis(spins), p);
  GapCurve curve;
  curve.p = p;
  curve.spins = spins;
  curve.lambda = lambda;

  std::vector<double> s(s_grid.begin(), s_grid.end());
  std::vector<double> g = evaluate(h, lambda, s, options.threads);

  if (options.refine_below > 0.0 && s.size() >= 2) {
    std::vector<double> extra;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (std::min(g[i], g[i + 1]) < options.refine_below) {
        const double step = (s[i + 1] - s[i]) / 3.0;
        extra.push_back(s[i] + step);
        extra.push_back(s[i] + 2.0 * step);
      }
    }
    if (!extra.empty()) {
      const std::vector<double> ge = evaluate(h, lambda, extra, options.threads);
      for (std::size_t i = 0; i < extra.size(); ++i) {
        s.push_back(extra[i]);
        g.push_back(ge[i]);
      }
    }
  }

  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  curve.samples.reserve(s.size());
  for (std::size_t i : order) {
    curve.samples.push_back({s[i], g[i]});
    if (g[i] < 1e-13) curve.near_degenerate = true;
  }
  return curve;
}

std::vector<GapMinimum> find_local_minima(const GapCurve& curve, double refine_tol,
                                          const std::function<double(double)>& gap) {
  if (curve.samples.size() < 3) throw DomainError("local minima need at least three samples");
  if (!(refine_tol > 0.0)) throw DomainError("refine_tol must be positive");
  const auto& x = curve.samples;
  std::vector<GapMinimum> out;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    if (!(x[k].delta < x[k - 1].delta && x[k].delta < x[k + 1].delta)) continue;
    double a = x[k - 1].s;
    double b = x[k + 1].s;
    double best_s = x[k].s;
    double best_g = x[k].delta;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = gap(c);
    double gd = gap(d);
    while (b - a > refine_tol) {
      if (gc < gd) {
        b = d;
        d = c;
        gd = gc;
        c = b - inv_phi * (b - a);
        gc = gap(c);
      } else {
        a = c;
        c = d;
        gc = gd;
        d = a + inv_phi * (b - a);
        gd = gap(d);
      }
    }
    if (gc < best_g) {
      best_g = gc;
      best_s = c;
    }
    if (gd < best_g) {
      best_g = gd;
      best_s = d;
    }
    out.push_back({best_s, best_g, static_cast<int>(out.size()) + 1, curve.spins});
  }
  return out;
}

std::vector<GapMinimum> find_local_minima(const GapCurve& curve, double refine_tol) {
  const SectorHamiltonian h(SectorBasis(curve.spins), curve.p);
  return find_local_minima(curve, refine_tol, [&](double s) { return gap_at(h, s, curve.lambda); });
}

SmallGapWindow small_gap_window(std::span<const GapMinimum> minima, double threshold) {
  SmallGapWindow w;
  for (const auto& m : minima) {
    if (m.delta >= threshold) continue;
    if (!w.found) {
      w.found = true;
      w.left = m.s_star;
    }
    w.right = m.s_star;
    ++w.minima;
  }
  return w;
}

std::string to_string(ScalingModel model) { return model == ScalingModel::Power ? "power" : "exponential"; }

ScalingFit scaling_fit(std::span<const GapMinimum> minima, ScalingModel model) {
  std::vector<int> sizes;
  for (const auto& m : minima) {
    if (!(m.delta > 0.0)) throw DomainError("scaling fit needs positive gaps");
    if (m.spins <= 0) throw DomainError("scaling fit needs positive sizes");
    sizes.push_back(m.spins);
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 4) throw DomainError("scaling fit needs at least four distinct sizes");

  const std::size_t n = minima.size();
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = model == ScalingModel::Power ? std::log(static_cast<double>(minima[i].spins)) : minima[i].spins;
    y[i] = std::log(minima[i].delta);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (intercept + slope * x[i]);
    ss_res += e * e;
  }
  ScalingFit fit;
  fit.model = model;
  fit.a = std::exp(intercept);
  fit.exponent = -slope;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.n_min = sizes.front();
  fit.n_max = sizes.back();
  fit.sizes = static_cast<int>(sizes.size());
  return fit;
}

std::vector<GapMinimum> select_rightmost(std::span<const std::vector<GapMinimum>> per_size) {
  std::vector<GapMinimum> out;
  for (const auto& list : per_size) {
    if (!list.empty()) out.push_back(list.back());
  }
  return out;
}

std::vector<GapMinimum> select_global(std::span<const std::vector<GapMinimum>> per_size) {
  std::vector<GapMinimum> out;
  for (const auto& list : per_size) {
    if (list.empty()) continue;
    out.push_back(*std::min_element(list.begin(), list.end(),
                                    [](const GapMinimum& a, const GapMinimum& b) { return a.delta < b.delta; }));
  }
  return out;
}

std::vector<GapMinimum> select_ordinal(std::span<const std::vector<GapMinimum>> per_size, int index) {
  if (index < 1) throw DomainError("minimum ordinal is 1-based");
  std::vector<GapMinimum> out;
  if (per_size.empty()) return out;
  const std::size_t reference = per_size.front().size();
  std::optional<double> previous;
  for (const auto& list : per_size) {
    if (list.empty()) continue;
    const GapMinimum* pick = nullptr;
    if (list.size() == reference && static_cast<std::size_t>(index) <= list.size()) {
      pick = &list[index - 1];
    } else if (previous) {
      pick = &*std::min_element(list.begin(), list.end(), [&](const GapMinimum& a, const GapMinimum& b) {
        return std::abs(a.s_star - *previous) < std::abs(b.s_star - *previous);
      });
    } else if (static_cast<std::size_t>(index) <= list.size()) {
      pick = &list[index - 1];
    }
    if (pick == nullptr) continue;
    out.push_back(*pick);
    previous = pick->s_star;
  }
  return out;
}

}  // namespace pspin
