#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle/brute_force.hpp"
#include "pspin/anneal.hpp"
#include "pspin/spectrum.hpp"

using namespace pspin;

namespace {

double norm(const StateVector& v) {
  double n = 0.0;
  for (const auto& c : v) n += std::norm(c);
  return std::sqrt(n);
}

}  // namespace

TEST_CASE("default step schedule") {
  CHECK(default_dt(50.0) == doctest::Approx(5e-3));
  CHECK(default_dt(200.0) == doctest::Approx(1e-2));
  CHECK(default_dt(1000.0) == doctest::Approx(0.025));
  CHECK_THROWS_AS(default_dt(0.0), DomainError);
}

TEST_CASE("initial state is the x-polarised product state") {
  const SectorHamiltonian h(SectorBasis(6), 3);
  const StateVector psi = ground_state(h, {0.0, 0.3});
  CHECK(norm(psi) == doctest::Approx(1.0));
  const Eigen::MatrixXd m = h.at({0.0, 0.3}).dense();
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(psi.data(), 7);
  const Eigen::VectorXcd hv = m.cast<std::complex<double>>() * v;
  // Eigenvector with eigenvalue -N.
  CHECK((hv + 6.0 * v).norm() < 1e-12);
}

TEST_CASE("tau = 0 leaves the state unchanged; N = 1 sudden quench gives one half") {
  const AnnealRun run = evolve(5, 1, AnnealPath::constant_lambda(0.1), 0.0);
  CHECK(run.steps == 0);
  CHECK(run.fidelity == doctest::Approx(0.5).epsilon(1e-12));
  const AnnealRun many = evolve(3, 8, AnnealPath::constant_lambda(0.5), 0.0);
  CHECK(many.fidelity == doctest::Approx(std::pow(0.5, 8)).epsilon(1e-10));
}

TEST_CASE("constant Hamiltonian: only phases evolve") {
  const AnnealPath still({{0.4, 0.6}});
  const AnnealRun run = evolve(3, 10, still, 25.0);
  CHECK(run.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(run.residual_energy == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("two-level system against an independent fine-step integrator") {
  // N = 1: H(s) = s lambda H0 + s(1-lambda) I - (1-s) sigma_x along lambda = 1.
  const AnnealPath path({{0.0, 1.0}, {1.0, 1.0}});
  const double tau = 3.0;
  const AnnealRun run = evolve(3, 1, path, tau, 1e-3);

  // Reference: classical RK4 on the 2x2 Schroedinger equation with tiny steps.
  using C = std::complex<double>;
  auto rhs = [&](double t, const std::array<C, 2>& y) {
    const double s = t / tau;
    // Basis (M=-1, M=+1): H0 = diag(+1, -1), V_TF = -sigma_x.
    const double d0 = s * 1.0;
    const double d1 = -s * 1.0;
    const double off = -(1.0 - s);
    const C i(0.0, 1.0);
    return std::array<C, 2>{-i * (d0 * y[0] + off * y[1]), -i * (off * y[0] + d1 * y[1])};
  };
  std::array<C, 2> y = {C(1.0 / std::sqrt(2.0)), C(1.0 / std::sqrt(2.0))};
  const int n = 200000;
  const double h = tau / n;
  for (int k = 0; k < n; ++k) {
    const double t = k * h;
    auto k1 = rhs(t, y);
    std::array<C, 2> tmp;
    for (int j = 0; j < 2; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    auto k2 = rhs(t + 0.5 * h, tmp);
    for (int j = 0; j < 2; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    auto k3 = rhs(t + 0.5 * h, tmp);
    for (int j = 0; j < 2; ++j) tmp[j] = y[j] + h * k3[j];
    auto k4 = rhs(t + h, tmp);
    for (int j = 0; j < 2; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  // Ground state at s = 1 is M = +1 (index 1).
  CHECK(run.fidelity == doctest::Approx(std::norm(y[1])).epsilon(1e-7));
  CHECK(std::abs(std::abs(run.final_state[1]) - std::abs(y[1])) < 1e-6);
}

TEST_CASE("slow annealing on an easy path reaches the ground state") {
  const AnnealPath path = AnnealPath::constant_lambda(0.1);
  const SectorHamiltonian h(SectorBasis(8), 5);
  double dmin = 1e300;
  for (int k = 0; k <= 2000; ++k) {
    const SchedulePoint pt = path.at(k / 2000.0);
    dmin = std::min(dmin, gap_at(h, pt.s, pt.lambda));
  }
  const AnnealRun run = evolve(5, 8, path, 1e3 / (dmin * dmin));
  CHECK(run.fidelity > 0.99);
  CHECK(run.norm_drift < 1e-8);
  CHECK(run.residual_energy >= -1e-12);
  CHECK(norm(run.final_state) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("time series records both ends") {
  EvolveOptions opt;
  opt.series_stride = 100;
  const AnnealRun run = evolve(3, 6, AnnealPath::constant_lambda(0.3), 10.0, 0.01, opt);
  REQUIRE(run.series.size() >= 2);
  CHECK(run.series.front().t == 0.0);
  CHECK(run.series.front().ground_overlap == doctest::Approx(1.0));
  CHECK(run.series.back().t == doctest::Approx(10.0));
  CHECK(run.series.back().ground_overlap == doctest::Approx(run.fidelity).epsilon(1e-12));
}

TEST_CASE("comparison runs match individual runs") {
  const AnnealPath a = AnnealPath::constant_lambda(0.1);
  const AnnealPath b = AnnealPath::constant_lambda(0.7);
  const auto [ra, rb] = compare_paths(5, 6, 20.0, a, b, std::nullopt, 2);
  CHECK(ra.fidelity == evolve(5, 6, a, 20.0).fidelity);
  CHECK(rb.fidelity == evolve(5, 6, b, 20.0).fidelity);
}

TEST_CASE("input validation") {
  const AnnealPath a = AnnealPath::constant_lambda(0.1);
  CHECK_THROWS_AS(evolve(5, 4, a, -1.0), DomainError);
  CHECK_THROWS_AS(evolve(5, 4, a, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(evolve(5, 0, a, 1.0), DomainError);
}
