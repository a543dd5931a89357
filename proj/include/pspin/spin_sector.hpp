#pragma once

// Operators of the p-spin annealing Hamiltonian restricted to the
// maximal total-spin sector S = N/2.
//
// Basis index i in {0, ..., N} carries total sigma^z eigenvalue M = -N + 2i.
// All operators are real symmetric with half-bandwidth at most two, so they
// are stored as the diagonal plus up to two super-diagonals.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "pspin/common.hpp"

namespace pspin {

class SectorBasis {
 public:
  explicit SectorBasis(int spins);

  int spins() const { return spins_; }
  int dim() const { return spins_ + 1; }
  /// Total sigma^z eigenvalue of basis state i.
  int magnetization(int i) const { return -spins_ + 2 * i; }

 private:
  int spins_;
};

/// Interaction order and system size. Odd p is the analysed case; even p
/// builds well-defined matrices but is flagged.
struct ModelParams {
  int p = 3;
  int spins = 1;

  bool even_order() const { return p % 2 == 0; }
};

void validate(const ModelParams& params);

class BandedSymmetricOperator {
 public:
  BandedSymmetricOperator(int dim, int half_bandwidth);

  int dim() const { return dim_; }
  int half_bandwidth() const { return half_bandwidth_; }

  /// Entry (i, i + offset) for offset in [0, half_bandwidth].
  double band(int offset, int i) const { return bands_[offset][i]; }
  double& band(int offset, int i) { return bands_[offset][i]; }
  std::span<const double> band(int offset) const { return bands_[offset]; }

  /// Entry (row, col) of the full symmetric matrix.
  double operator()(int row, int col) const;

  bool all_finite() const;

  /// Dense symmetric expansion. Only the eigensolvers call this.
  Eigen::MatrixXd dense() const;

  /// y = A x for complex vectors of length dim().
  void apply(std::span<const std::complex<double>> x, std::span<std::complex<double>> y) const;

  /// A + B with the wider of the two bandwidths.
  friend BandedSymmetricOperator operator+(const BandedSymmetricOperator& a,
                                           const BandedSymmetricOperator& b);
  friend BandedSymmetricOperator operator*(double scale, const BandedSymmetricOperator& a);

  friend bool operator==(const BandedSymmetricOperator&, const BandedSymmetricOperator&) = default;

 private:
  int dim_;
  int half_bandwidth_;
  // bands_[k][i] holds (i, i + k); bands_[k] has dim - k entries.
  std::array<std::vector<double>, 3> bands_;
};

/// H0 = -N (M/N)^p, diagonal. Valid for any p >= 1.
BandedSymmetricOperator build_h0(const SectorBasis& basis, int p);

/// V_TF = -2 S^x, tridiagonal with super-diagonal -sqrt((i+1)(N-i)).
BandedSymmetricOperator build_vtf(const SectorBasis& basis);

/// V_AFF = (4/N) (S^x)^2, obtained by multiplying the S^x bands exactly.
BandedSymmetricOperator build_vaff(const SectorBasis& basis);

/// The three constituent operators, built once and recombined per point.
struct SectorHamiltonian {
  SectorHamiltonian(const SectorBasis& basis, int p);

  int p;
  SectorBasis basis;
  BandedSymmetricOperator h0;
  BandedSymmetricOperator vaff;
  BandedSymmetricOperator vtf;

  BandedSymmetricOperator at(const SchedulePoint& point) const;
  /// Directional derivative dH = ds dH/ds + dlambda dH/dlambda at `point`.
  BandedSymmetricOperator derivative(const SchedulePoint& point, double ds, double dlambda) const;
};

/// s {lambda H0 + (1 - lambda) V_AFF} + (1 - s) V_TF.
BandedSymmetricOperator assemble(const SectorBasis& basis, int p, const SchedulePoint& point);

/// (row, col, value) for every entry inside the band, zeros included, both
/// triangles, row-major.
struct MatrixEntry {
  int row;
  int col;
  double value;
};
std::vector<MatrixEntry> entries(const BandedSymmetricOperator& op);

}  // namespace pspin
