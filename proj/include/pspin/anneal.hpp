#pragma once

// Schroedinger evolution in the maximal-spin sector along an annealing path.

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "pspin/phase_diagram.hpp"
#include "pspin/spin_sector.hpp"

namespace pspin {

using StateVector = std::vector<std::complex<double>>;

/// Step used when the caller gives none: tau/1e4 up to tau = 100, then 1e-2
/// up to tau = 400, then tau/4e4 (at most 4e4 steps).
double default_dt(double tau);

struct EvolveOptions {
  /// Record the overlap with the instantaneous ground state every this many
  /// steps (and at both ends). Zero disables the time series.
  int series_stride = 0;
  /// Steps whose first Magnus term exceeds this norm are split in half.
  double max_generator = 0.05;
  /// Steps whose norm changes by more than this are split in half.
  double unitarity_tolerance = 1e-10;
};

struct TimeSample {
  double t = 0.0;
  SchedulePoint point;
  /// |<ground(H(t))|psi(t)>|^2
  double ground_overlap = 0.0;
};

struct AnnealRun {
  AnnealPath path{{{0.0, 0.0}}};
  int p = 0;
  int spins = 0;
  double tau = 0.0;
  double dt = 0.0;
  long steps = 0;
  /// Weight of the final state in the ground eigenspace of H at the path end.
  double fidelity = 0.0;
  /// (<psi|H_end|psi> - E0) / N.
  double residual_energy = 0.0;
  /// max over steps of | ||psi|| - 1 |.
  double norm_drift = 0.0;
  StateVector final_state;
  std::vector<TimeSample> series;
};

/// Ground state of H at `point`; the analytic x-polarised state at s = 0.
StateVector ground_state(const SectorHamiltonian& h, const SchedulePoint& point);

/// Integrates i d|psi>/dt = H(t)|psi> from the ground state at the path start,
/// moving along the path at uniform arc-length speed over [0, tau]. Each step
/// is exactly orthogonal in the eigenbasis of H at the step midpoint (first
/// Magnus term of the interaction picture, Cayley transform).
AnnealRun evolve(int p, int spins, const AnnealPath& path, double tau, std::optional<double> dt = std::nullopt,
                 const EvolveOptions& options = {});

std::pair<AnnealRun, AnnealRun> compare_paths(int p, int spins, double tau, const AnnealPath& a,
                                              const AnnealPath& b, std::optional<double> dt = std::nullopt,
                                              int threads = 1, const EvolveOptions& options = {});

}  // namespace pspin
