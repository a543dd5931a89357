#include "pspin/spin_sector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pspin {

SectorBasis::SectorBasis(int spins) : spins_(spins) {
  if (spins <= 0) throw DomainError("number of spins must be positive");
}

void validate(const ModelParams& params) {
  if (params.p < 1) throw DomainError("interaction order p must be >= 1");
  if (params.spins <= 0) throw DomainError("number of spins must be positive");
}

BandedSymmetricOperator::BandedSymmetricOperator(int dim, int half_bandwidth)
    : dim_(dim), half_bandwidth_(half_bandwidth) {
  if (dim <= 0) throw DomainError("operator dimension must be positive");
  if (half_bandwidth < 0 || half_bandwidth > 2) throw DomainError("half-bandwidth must be 0, 1 or 2");
  for (int k = 0; k <= half_bandwidth; ++k) bands_[k].assign(std::max(dim - k, 0), 0.0);
}

double BandedSymmetricOperator::operator()(int row, int col) const {
  const int lo = std::min(row, col);
  const int offset = std::abs(row - col);
  if (offset > half_bandwidth_ || lo + offset >= dim_) return 0.0;
  return bands_[offset][lo];
}

bool BandedSymmetricOperator::all_finite() const {
  for (int k = 0; k <= half_bandwidth_; ++k) {
    for (double v : bands_[k]) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

Eigen::MatrixXd BandedSymmetricOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int k = 0; k <= half_bandwidth_; ++k) {
    for (int i = 0; i + k < dim_; ++i) {
      m(i, i + k) = bands_[k][i];
      m(i + k, i) = bands_[k][i];
    }
  }
  return m;
}

void BandedSymmetricOperator::apply(std::span<const std::complex<double>> x,
                                    std::span<std::complex<double>> y) const {
  for (int i = 0; i < dim_; ++i) y[i] = bands_[0][i] * x[i];
  for (int k = 1; k <= half_bandwidth_; ++k) {
    for (int i = 0; i + k < dim_; ++i) {
      y[i] += bands_[k][i] * x[i + k];
      y[i + k] += bands_[k][i] * x[i];
    }
  }
}

BandedSymmetricOperator operator+(const BandedSymmetricOperator& a, const BandedSymmetricOperator& b) {
  if (a.dim_ != b.dim_) throw DomainError("operator dimensions differ");
  BandedSymmetricOperator sum(a.dim_, std::max(a.half_bandwidth_, b.half_bandwidth_));
  for (int k = 0; k <= sum.half_bandwidth_; ++k) {
    for (int i = 0; i + k < sum.dim_; ++i) {
      double v = 0.0;
      if (k <= a.half_bandwidth_) v += a.bands_[k][i];
      if (k <= b.half_bandwidth_) v += b.bands_[k][i];
      sum.bands_[k][i] = v;
    }
  }
  return sum;
}

BandedSymmetricOperator operator*(double scale, const BandedSymmetricOperator& a) {
  BandedSymmetricOperator out = a;
  for (int k = 0; k <= out.half_bandwidth_; ++k) {
    for (double& v : out.bands_[k]) v *= scale;
  }
  return out;
}

BandedSymmetricOperator build_h0(const SectorBasis& basis, int p) {
  if (p < 1) throw DomainError("interaction order p must be >= 1");
  const int n = basis.spins();
  BandedSymmetricOperator h0(basis.dim(), 0);
  for (int i = 0; i < basis.dim(); ++i) {
    const double m = static_cast<double>(basis.magnetization(i)) / n;
    h0.band(0, i) = -n * std::pow(m, p);
  }
  return h0;
}

namespace {

// Super-diagonal of S^x: <i|S^x|i+1> = sqrt((i+1)(N-i)) / 2.
std::vector<double> sx_superdiagonal(const SectorBasis& basis) {
  const int n = basis.spins();
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = 0.5 * std::sqrt(static_cast<double>(i + 1) * (n - i));
  return x;
}

}  // namespace

BandedSymmetricOperator build_vtf(const SectorBasis& basis) {
  const auto x = sx_superdiagonal(basis);
  BandedSymmetricOperator v(basis.dim(), 1);
  for (int i = 0; i + 1 < basis.dim(); ++i) v.band(1, i) = -2.0 * x[i];
  return v;
}

BandedSymmetricOperator build_vaff(const SectorBasis& basis) {
  const int n = basis.spins();
  const auto x = sx_superdiagonal(basis);
  const double scale = 4.0 / n;
  BandedSymmetricOperator v(basis.dim(), 2);
  // (S^x)^2: diagonal x_{i-1}^2 + x_i^2, second super-diagonal x_i x_{i+1}.
  for (int i = 0; i < basis.dim(); ++i) {
    double d = 0.0;
    if (i > 0) d += x[i - 1] * x[i - 1];
    if (i < n) d += x[i] * x[i];
    v.band(0, i) = scale * d;
  }
  for (int i = 0; i + 2 < basis.dim(); ++i) v.band(2, i) = scale * x[i] * x[i + 1];
  return v;
}

SectorHamiltonian::SectorHamiltonian(const SectorBasis& b, int order)
    : p(order), basis(b), h0(build_h0(b, order)), vaff(build_vaff(b)), vtf(build_vtf(b)) {}

BandedSymmetricOperator SectorHamiltonian::at(const SchedulePoint& point) const {
  validate(point);
  const double s = point.s;
  const double l = point.lambda;
  return (s * l) * h0 + (s * (1.0 - l)) * vaff + (1.0 - s) * vtf;
}

BandedSymmetricOperator SectorHamiltonian::derivative(const SchedulePoint& point, double ds,
                                                      double dlambda) const {
  const double s = point.s;
  const double l = point.lambda;
  return (ds * l + s * dlambda) * h0 + (ds * (1.0 - l) - s * dlambda) * vaff + (-ds) * vtf;
}

BandedSymmetricOperator assemble(const SectorBasis& basis, int p, const SchedulePoint& point) {
  return SectorHamiltonian(basis, p).at(point);
}

std::vector<MatrixEntry> entries(const BandedSymmetricOperator& op) {
  std::vector<MatrixEntry> out;
  const int w = op.half_bandwidth();
  for (int r = 0; r < op.dim(); ++r) {
    for (int c = std::max(0, r - w); c <= std::min(op.dim() - 1, r + w); ++c) {
      out.push_back({r, c, op(r, c)});
    }
  }
  return out;
}

}  // namespace pspin
