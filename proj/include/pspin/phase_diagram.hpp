#pragma once

// Phase diagrams on the (s, lambda) plane and annealing-path safety checks.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pspin/meanfield.hpp"

namespace pspin {

struct GridSpec {
  double s_min = 0.0;
  double s_max = 1.0;
  int s_points = 201;
  double lambda_min = 0.0;
  double lambda_max = 1.0;
  int lambda_points = 201;
  /// Bisection width along grid edges.
  double refine_tolerance = 1e-4;
  double jump_threshold = 1e-3;

  double s_at(int i) const;
  double lambda_at(int j) const;
};

void validate(const GridSpec& grid);

/// Which phases a boundary separates. QP2 only appears on lambda = 0, where the
/// lower F branch degenerates into it.
enum class BoundaryKind { QP_F, F_F, QP_QP2, QP2_F };

std::string to_string(BoundaryKind kind);
/// e.g. "QP-F second", "F-F first".
std::string boundary_tag(BoundaryKind kind, TransitionOrder order);

struct BoundaryPoint {
  double s = 0.0;
  double lambda = 0.0;
  BoundaryKind kind = BoundaryKind::QP_F;
  TransitionOrder order = TransitionOrder::Second;
  double d_mz = 0.0;
  double d_mx = 0.0;
  /// True when refined along s at fixed lambda (a grid row), false along lambda.
  bool along_s = true;
};

struct Polyline {
  BoundaryKind kind = BoundaryKind::QP_F;
  TransitionOrder order = TransitionOrder::Second;
  std::vector<SchedulePoint> vertices;
};

struct Cell {
  double s = 0.0;
  double lambda = 0.0;
  SaddleSolution solution;
};

struct PhaseDiagram {
  InteractionOrder order;
  GridSpec grid;
  /// Row-major: index = j * s_points + i for lambda index j and s index i.
  std::vector<Cell> cells;
  std::vector<BoundaryPoint> points;
  std::vector<Polyline> boundaries;
  int nonconverged = 0;
  bool grid_too_coarse = false;

  const Cell& cell(int i, int j) const { return cells[static_cast<std::size_t>(j) * grid.s_points + i]; }
};

/// Classifies every grid point, refines each boundary crossing along grid rows
/// and columns, and chains the crossings of each tag into polylines.
PhaseDiagram scan(const InteractionOrder& order, const GridSpec& grid = {}, int threads = 1,
                  const SolverOptions& solver = {});

/// Largest grid lambda > 0 such that every row with 0 < lambda' <= lambda has
/// no first-order crossing. Empty if even the first positive row has one.
std::optional<double> measure_lambda_star(const PhaseDiagram& diagram);

/// A polyline in the (s, lambda) square traversed at uniform arc-length speed.
class AnnealPath {
 public:
  /// At least one point, all inside the unit square. Repeated consecutive
  /// points are merged.
  explicit AnnealPath(std::vector<SchedulePoint> points);

  /// (0, lambda) -> (s_turn, lambda) -> (1, 1).
  static AnnealPath constant_lambda(double lambda, double s_turn = 0.99);

  const std::vector<SchedulePoint>& points() const { return points_; }
  std::size_t segments() const { return points_.size() - 1; }
  double length() const { return cumulative_.back(); }
  /// Arc-length fraction at which vertex k is reached.
  double vertex_fraction(std::size_t k) const;

  /// Starts at s = 0 and ends at (1, 1).
  bool spans_schedule() const;
  bool monotone_s() const;
  bool monotone_lambda() const;

  /// Point at arc-length fraction u in [0, 1].
  SchedulePoint at(double u) const;
  /// d(s, lambda)/du on the segment containing u (left-closed); zero for a
  /// single-point path.
  std::pair<double, double> velocity(double u) const;

  std::string describe() const;

 private:
  std::size_t segment_of(double u) const;

  std::vector<SchedulePoint> points_;
  std::vector<double> cumulative_;
};

struct PathCrossing {
  SchedulePoint at;
  BoundaryKind kind = BoundaryKind::QP_F;
  TransitionOrder order = TransitionOrder::First;
  std::size_t path_segment = 0;
};

struct PathSafety {
  bool safe = true;
  std::vector<PathCrossing> crossings;
  /// Path segments lying on lambda = 0, where there are no quantum fluctuations.
  std::vector<std::size_t> degenerate_segments;
};

/// Safe iff the path crosses no first-order boundary of the diagram. Segments
/// on lambda = 0 are reported separately.
PathSafety path_is_safe(const AnnealPath& path, const PhaseDiagram& diagram);

}  // namespace pspin
