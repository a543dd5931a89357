#include "pspin/anneal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace pspin {

double default_dt(double tau) {
  if (!(tau > 0.0)) throw DomainError("default step needs tau > 0");
  if (tau <= 100.0) return tau / 1e4;
  if (tau <= 400.0) return 1e-2;
  return tau / 4e4;
}

namespace {

using CVec = Eigen::VectorXcd;

struct Eigensystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

Eigensystem eigensystem(const BandedSymmetricOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Weight of psi in the lowest eigenspace (degenerate levels within 1e-9).
double ground_weight(const Eigensystem& es, const CVec& psi) {
  const double e0 = es.values(0);
  const double tol = 1e-9 * std::max(1.0, std::abs(e0));
  double w = 0.0;
  for (Eigen::Index k = 0; k < es.values.size() && es.values(k) - e0 <= tol; ++k) {
    w += std::norm(es.vectors.col(k).cast<std::complex<double>>().dot(psi));
  }
  return std::min(w, 1.0);
}

// 2 int_0^{h/2} t sin(w t) dt
double magnus_weight(double omega, double h) {
  const double x = 0.5 * omega * h;
  if (std::abs(x) < 1e-3) return omega * h * h * h / 12.0 * (1.0 - x * x / 10.0);
  return 2.0 / (omega * omega) * (std::sin(x) - x * std::cos(x));
}

class Stepper {
 public:
  Stepper(const SectorHamiltonian& h, const AnnealPath& path, double tau, const EvolveOptions& options)
      : h_(h), path_(path), tau_(tau), options_(options) {}

  // Advances psi from t0 to t0 + h within one path segment.
  void step(CVec& psi, double t0, double h, double& drift, int depth = 0) {
    const double tm = t0 + 0.5 * h;
    const SchedulePoint mid = path_.at(tm / tau_);
    const auto [us, ul] = path_.velocity(tm / tau_);
    const Eigensystem es = eigensystem(h_.at(mid));
    const Eigen::MatrixXd g =
        es.vectors.transpose() * h_.derivative(mid, us / tau_, ul / tau_).dense() * es.vectors;
    const Eigen::Index n = g.rows();
    Eigen::MatrixXd omega(n, n);
    double largest = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        omega(r, c) = g(r, c) * magnus_weight(es.values(r) - es.values(c), h);
        largest = std::max(largest, std::abs(omega(r, c)));
      }
    }
    if (largest > options_.max_generator && depth < 40) {
      step(psi, t0, 0.5 * h, drift, depth + 1);
      step(psi, t0 + 0.5 * h, 0.5 * h, drift, depth + 1);
      return;
    }

    const double before = psi.norm();
    CVec phi = es.vectors.transpose().cast<std::complex<double>>() * psi;
    for (Eigen::Index k = 0; k < n; ++k) phi(k) *= std::polar(1.0, -0.5 * es.values(k) * h);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(id - 0.5 * omega);
    Eigen::MatrixXd parts(n, 2);
    parts.col(0) = phi.real();
    parts.col(1) = phi.imag();
    parts = lu.solve((id + 0.5 * omega) * parts);
    for (Eigen::Index k = 0; k < n; ++k) {
      phi(k) = std::complex<double>(parts(k, 0), parts(k, 1)) * std::polar(1.0, -0.5 * es.values(k) * h);
    }
    CVec next = es.vectors.cast<std::complex<double>>() * phi;

    const double after = next.norm();
    if (std::abs(after - before) > options_.unitarity_tolerance) {
      if (depth >= 40) throw NumericalError("step rejected: unitarity error " + std::to_string(after - before));
      step(psi, t0, 0.5 * h, drift, depth + 1);
      step(psi, t0 + 0.5 * h, 0.5 * h, drift, depth + 1);
      return;
    }
    psi = std::move(next);
    drift = std::max(drift, std::abs(after - 1.0));
  }

 private:
  const SectorHamiltonian& h_;
  const AnnealPath& path_;
  double tau_;
  EvolveOptions options_;
};

StateVector to_state(const CVec& v) { return StateVector(v.data(), v.data() + v.size()); }

}  // namespace

StateVector ground_state(const SectorHamiltonian& h, const SchedulePoint& point) {
  validate(point);
  const int n = h.basis.spins();
  StateVector psi(h.basis.dim());
  if (point.s == 0.0) {
    // <i|+x...+x> = sqrt(C(N, i)) / 2^(N/2)
    for (int i = 0; i <= n; ++i) {
      const double log_amp = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0)) -
                             0.5 * n * std::log(2.0);
      psi[i] = std::exp(log_amp);
    }
    return psi;
  }
  const Eigensystem es = eigensystem(h.at(point));
  for (int i = 0; i <= n; ++i) psi[i] = es.vectors(i, 0);
  return psi;
}

AnnealRun evolve(int p, int spins, const AnnealPath& path, double tau, std::optional<double> dt,
                 const EvolveOptions& options) {
  validate(ModelParams{p, spins});
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and >= 0");
  double step = 0.0;
  if (tau > 0.0) {
    step = dt ? *dt : default_dt(tau);
    if (!(step > 0.0) || step > tau) throw DomainError("dt must satisfy 0 < dt <= tau");
  }
  if (options.series_stride < 0) throw DomainError("series stride must be >= 0");

  const SectorHamiltonian h(SectorBasis(spins), p);
  AnnealRun run;
  run.path = path;
  run.p = p;
  run.spins = spins;
  run.tau = tau;
  run.dt = step;

  const StateVector start = ground_state(h, path.points().front());
  CVec psi = Eigen::Map<const CVec>(start.data(), static_cast<Eigen::Index>(start.size()));

  auto record = [&](double t) {
    const SchedulePoint pt = tau > 0.0 ? path.at(t / tau) : path.points().back();
    run.series.push_back({t, pt, ground_weight(eigensystem(h.at(pt)), psi)});
  };
  if (options.series_stride > 0) record(0.0);

  if (tau > 0.0 && path.length() > 0.0) {
    Stepper stepper(h, path, tau, options);
    for (std::size_t k = 0; k < path.segments(); ++k) {
      const double t_begin = tau * path.vertex_fraction(k);
      const double t_end = tau * path.vertex_fraction(k + 1);
      if (!(t_end > t_begin)) continue;
      const long n = std::max(1L, static_cast<long>(std::ceil((t_end - t_begin) / step - 1e-9)));
      const double hstep = (t_end - t_begin) / n;
      for (long i = 0; i < n; ++i) {
        stepper.step(psi, t_begin + i * hstep, hstep, run.norm_drift);
        ++run.steps;
        if (options.series_stride > 0 && run.steps % options.series_stride == 0) record(t_begin + (i + 1) * hstep);
      }
    }
  } else if (tau > 0.0) {
    // Zero-length path: H is constant, so evolve exactly in its eigenbasis.
    const Eigensystem es = eigensystem(h.at(path.points().front()));
    CVec phi = es.vectors.transpose().cast<std::complex<double>>() * psi;
    for (Eigen::Index k = 0; k < phi.size(); ++k) phi(k) *= std::polar(1.0, -es.values(k) * tau);
    psi = es.vectors.cast<std::complex<double>>() * phi;
    run.steps = 1;
    run.norm_drift = std::abs(psi.norm() - 1.0);
  }
  if (options.series_stride > 0 && (run.series.empty() || run.series.back().t < tau)) record(tau);

  const BandedSymmetricOperator h_end = h.at(path.points().back());
  const Eigensystem fin = eigensystem(h_end);
  run.fidelity = ground_weight(fin, psi);
  std::vector<std::complex<double>> hpsi(psi.size());
  h_end.apply(std::span<const std::complex<double>>(psi.data(), psi.size()), hpsi);
  std::complex<double> energy = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) energy += std::conj(psi(k)) * hpsi[k];
  run.residual_energy = (energy.real() - fin.values(0)) / spins;
  run.final_state = to_state(psi);
  return run;
}

std::pair<AnnealRun, AnnealRun> compare_paths(int p, int spins, double tau, const AnnealPath& a,
                                              const AnnealPath& b, std::optional<double> dt, int threads,
                                              const EvolveOptions& options) {
  AnnealRun runs[2];
  const AnnealPath* paths[2] = {&a, &b};
  parallel_for(2, threads, [&](std::size_t k) { runs[k] = evolve(p, spins, *paths[k], tau, dt, options); });
  return {std::move(runs[0]), std::move(runs[1])};
}

}  // namespace pspin
