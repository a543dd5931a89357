#pragma once

// Static-approximation mean-field theory of the p-spin annealing model.
//
// The pseudo free energy per spin is
//
//   f = (p-1) s lambda mz^p - s(1-lambda) mx^2 - (1/beta) ln 2cosh(beta r),
//   r = sqrt(a^2 + b^2),  a = p s lambda mz^(p-1),  b = 1 - s - 2 s (1-lambda) mx,
//
// with the self-consistent equations (mz, mx) = (a, b) tanh(beta r) / r.
// At zero temperature the tanh is replaced by one and ln 2cosh by r.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pspin/common.hpp"

namespace pspin {

struct Magnetization {
  double mz = 0.0;
  double mx = 0.0;
};

class InverseTemperature {
 public:
  static InverseTemperature infinite() { return InverseTemperature(0.0, true); }
  static InverseTemperature finite(double beta);

  bool is_infinite() const { return infinite_; }
  /// Only meaningful when finite.
  double value() const { return beta_; }

 private:
  InverseTemperature(double beta, bool infinite) : beta_(beta), infinite_(infinite) {}
  double beta_;
  bool infinite_;
};

/// Interaction order p, finite (odd p >= 3 analysed) or the p -> infinity limit.
struct InteractionOrder {
  int p = 3;
  bool infinite = false;

  static InteractionOrder finite(int p) { return {p, false}; }
  static InteractionOrder limit() { return {0, true}; }
  std::string to_string() const { return infinite ? "inf" : std::to_string(p); }
};

enum class Phase { QP, QP2, F, Unresolved };

/// Ferromagnetic sub-branch. Upper: the H0 field dominates the AFF field
/// (mz close to one). Lower: intermediate 0 < mz < 1 next to the QP2 envelope.
enum class FerroBranch { None, Upper, Lower };

struct PhaseLabel {
  Phase phase = Phase::Unresolved;
  FerroBranch branch = FerroBranch::None;

  friend bool operator==(const PhaseLabel&, const PhaseLabel&) = default;
};

std::string to_string(Phase phase);
std::string to_string(const PhaseLabel& label);

struct SaddleSolution {
  Magnetization m;
  double free_energy = 0.0;
  PhaseLabel label;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

struct SolverOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  int max_iterations = 100000;
  /// Give up early once the best residual has not dropped tenfold within this
  /// many iterations. Zero disables the check.
  int stall_window = 2000;
  /// Seeds for the ferromagnetic branch search.
  std::vector<Magnetization> seeds = {{1.0, 0.0}, {0.9, 0.1}, {0.5, 0.5}, {0.1, 0.9}};
  /// Zero temperature only: add seeds at every sign change of the reduced
  /// one-dimensional equation on the unit circle. This reaches branches that
  /// repel the damped iteration near first-order transitions.
  bool bracket_seeds = true;
  int bracket_cells = 2048;
};

/// Pseudo free energy per spin at (mz, mx). Requires p >= 3.
double free_energy(int p, const SchedulePoint& point, InverseTemperature beta, const Magnetization& m);

/// Maximum-norm residual |T(m) - m| of the self-consistent map.
double saddle_residual(int p, const SchedulePoint& point, InverseTemperature beta, const Magnetization& m);

/// Damped fixed-point iteration from `seed`; finishes with Newton steps on the
/// same equations once the residual is small.
SaddleSolution solve_saddle(int p, const SchedulePoint& point, InverseTemperature beta, const Magnetization& seed,
                            const SolverOptions& options = {});

/// Lower edge 1/(3 - 2 lambda) of the QP2 domain; also the QP stability limit.
double qp2_lower_edge(double lambda);

/// f_QP = -s lambda + 2 s - 1 for 0 <= s < 1/(3 - 2 lambda).
double f_qp(const SchedulePoint& point);
bool in_qp_domain(const SchedulePoint& point);

/// f_QP2 = -(1-s)^2 / (4 s (1-lambda)) for 1/(3 - 2 lambda) <= s < 1, lambda < 1.
double f_qp2(const SchedulePoint& point);
Magnetization qp2_magnetization(const SchedulePoint& point);
bool in_qp2_domain(const SchedulePoint& point);

PhaseLabel label_solution(int p, const SchedulePoint& point, const Magnetization& m);

struct Classification {
  SaddleSolution stable;
  std::vector<SaddleSolution> candidates;
  /// lambda = 0: H(s, 0) is diagonal in the x basis; no annealing dynamics.
  bool degenerate_line = false;
  bool even_order = false;
};

/// Global free-energy minimiser among QP, QP2 and every converged F solution.
Classification classify_phase(int p, const SchedulePoint& point,
                              InverseTemperature beta = InverseTemperature::infinite(),
                              const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// p -> infinity closed forms

struct InfinitePFreeEnergies {
  std::optional<double> f_qp;
  double f_f = 0.0;  // -s lambda, upper F with mz = 1
  std::optional<double> f_qp2;
  /// mz = sqrt(1 - ((1-s) / (2 s (1-lambda)))^2) of the lower F branch.
  std::optional<double> mz_lower;
};

InfinitePFreeEnergies pinf_free_energies(const SchedulePoint& point);

/// Stable phase in the p -> infinity limit from the closed forms.
SaddleSolution classify_infinite_p(const SchedulePoint& point);

/// Closed-form p -> infinity boundaries.
double pinf_second_order_boundary(double lambda);  // 1/(3 - 2 lambda), lambda <= 1/2
double pinf_first_order_boundary();               // s = 1/2, lambda > 1/2
double pinf_ff_boundary(double lambda);           // (1 - 2 sqrt(lambda - lambda^2)) / (2 lambda - 1)^2

/// Classification at `point` for either a finite p or the limit.
SaddleSolution classify(const InteractionOrder& order, const SchedulePoint& point,
                        const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// transitions along one-parameter lines

enum class TransitionOrder { First, Second };
std::string to_string(TransitionOrder order);

struct Transition {
  double s = 0.0;  // line parameter; s for slices, lambda for columns
  double d_mz = 0.0;
  double d_mx = 0.0;
  TransitionOrder order = TransitionOrder::Second;
  PhaseLabel before;
  PhaseLabel after;
};

struct JumpOptions {
  double threshold = 1e-3;
  double refine_tolerance = 1e-6;
  int threads = 1;
};

struct LineScan {
  std::vector<double> grid;
  std::vector<SaddleSolution> samples;
  std::vector<Transition> transitions;
  bool grid_too_coarse = false;
  int nonconverged = 0;
};

using LineClassifier = std::function<SaddleSolution(double)>;

/// Locates transitions of `at(t)` along a strictly increasing grid, refining
/// each candidate cell by bisection. `samples` may be supplied precomputed.
LineScan locate_transitions(const LineClassifier& at, std::span<const double> grid,
                            std::vector<SaddleSolution> samples, const JumpOptions& options);

struct SliceScan : LineScan {
  bool degenerate_line = false;
};

/// Transitions along the constant-lambda slice at the given s values.
SliceScan detect_jump(const InteractionOrder& order, double lambda, std::span<const double> s_grid,
                      const JumpOptions& options = {}, const SolverOptions& solver = {});
SliceScan detect_jump(int p, double lambda, std::span<const double> s_grid, const JumpOptions& options = {},
                      const SolverOptions& solver = {});

}  // namespace pspin
