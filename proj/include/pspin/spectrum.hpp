#pragma once

// Low-lying spectrum of H(s, lambda) in the maximal-spin sector: gap curves,
// their local minima, and finite-size scaling fits of the minima.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pspin/spin_sector.hpp"

namespace pspin {

struct LowestPair {
  double e0 = 0.0;
  double e1 = 0.0;
  double gap() const { return e1 - e0; }
};

/// Two smallest eigenvalues of a banded symmetric operator (dim >= 2).
/// Throws NumericalError if the eigensolver does not converge.
LowestPair lowest_two(const BandedSymmetricOperator& op);

inline constexpr int kMaxSpins = 4096;

struct GapSample {
  double s = 0.0;
  double delta = 0.0;
};

struct GapCurve {
  int p = 0;
  int spins = 0;
  double lambda = 0.0;
  std::vector<GapSample> samples;
  /// Some sampled gap fell below 1e-13; not an error, but worth a look.
  bool near_degenerate = false;
};

struct GapOptions {
  /// Cells with a gap below this value get two extra points each (grid
  /// tripling). Zero disables refinement.
  double refine_below = 0.1;
  int threads = 1;
};

/// 2001 uniform points on [0, 1].
std::vector<double> default_gap_grid();

GapCurve gap_curve(int p, int spins, double lambda, std::span<const double> s_grid, const GapOptions& options = {});

/// Gap E1 - E0 at a single point.
double gap_at(const SectorHamiltonian& h, double s, double lambda);

struct GapMinimum {
  double s_star = 0.0;
  double delta = 0.0;
  int index = 0;  // 1-based, numbered from the left
  int spins = 0;
};

/// Interior samples below both neighbours, refined by golden-section search on
/// `gap` to an s-tolerance of `refine_tol`. Empty for monotone curves.
std::vector<GapMinimum> find_local_minima(const GapCurve& curve, double refine_tol,
                                          const std::function<double(double)>& gap);

/// Same, re-diagonalising H(s, curve.lambda) at the probe points.
std::vector<GapMinimum> find_local_minima(const GapCurve& curve, double refine_tol = 1e-7);

/// Span between the first and last local minimum whose gap is below `threshold`.
struct SmallGapWindow {
  bool found = false;
  double left = 0.0;
  double right = 0.0;
  int minima = 0;
};

SmallGapWindow small_gap_window(std::span<const GapMinimum> minima, double threshold = 0.1);

enum class ScalingModel { Power, Exponential };
std::string to_string(ScalingModel model);

/// POWER: delta = a N^-exponent. EXPONENTIAL: delta = a exp(-exponent N).
struct ScalingFit {
  ScalingModel model = ScalingModel::Power;
  double a = 0.0;
  double exponent = 0.0;
  /// Coefficient of determination in the linearising coordinates.
  double r_squared = 0.0;
  int n_min = 0;
  int n_max = 0;
  int sizes = 0;
};

/// Least-squares line in (ln N, ln delta) or (N, ln delta). Needs >= 4 distinct sizes.
ScalingFit scaling_fit(std::span<const GapMinimum> minima, ScalingModel model);

// Selecting one minimum per size from per-size minima lists (ordered by size).
std::vector<GapMinimum> select_rightmost(std::span<const std::vector<GapMinimum>> per_size);
std::vector<GapMinimum> select_global(std::span<const std::vector<GapMinimum>> per_size);
/// Ordinal `index` (1-based); sizes whose minimum count differs from the
/// first size fall back to the minimum nearest in s to the previous pick.
std::vector<GapMinimum> select_ordinal(std::span<const std::vector<GapMinimum>> per_size, int index);

}  // namespace pspin
