#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "homsol/hunter.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace homsol;

namespace {
constexpr double kPi = 3.14159265358979323846;

// RMS residual of F(D^2 u) for u = r^d * phi(theta), computed independently
// of the hunt objective (direct FD Hessian of the combined profile).
double rms_residual(const EllipticOperator& F, const DoublePoly& phi, double d, const SampleSet& samples) {
  double ss = 0.0;
  for (const auto& x : samples.points) {
    double r = op_eval(F, detail::profile_fd_hessian(phi, d, x));
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(samples.points.size()));
}
}  // namespace

TEST_CASE("exact sphere monomial integrals match closed forms") {
  using detail::sphere_monomial_integral;
  CHECK(sphere_monomial_integral({0, 0}, 2) == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  CHECK(sphere_monomial_integral({2, 0}, 2) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(sphere_monomial_integral({1, 0}, 2) == 0.0);
  CHECK(sphere_monomial_integral({0, 0, 0}, 3) == doctest::Approx(4.0 * kPi).epsilon(1e-13));
  CHECK(sphere_monomial_integral({2, 0, 0}, 3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
  CHECK(sphere_monomial_integral({2, 2, 0}, 3) == doctest::Approx(4.0 * kPi / 15.0).epsilon(1e-13));
  CHECK(sphere_monomial_integral({2, 1, 0}, 3) == 0.0);
}

TEST_CASE("profile basis is orthonormal and carries degree labels") {
  for (auto [n, lmax, count] : {std::tuple{2, 4, 9}, std::tuple{3, 3, 16}}) {
    ProfileBasis pb = build_profile_basis(n, lmax);
    CHECK(static_cast<int>(pb.funcs.size()) == count);
    CHECK(pb.ell.front() == 0);
    CHECK(pb.ell.back() == lmax);
    for (size_t i = 0; i < pb.funcs.size(); ++i)
      for (size_t j = i; j < pb.funcs.size(); ++j) {
        double ip = detail::sphere_ip(pb.funcs[i], pb.funcs[j], n);
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-12);
      }
  }
}

TEST_CASE("harmonic_distance on hand-built coefficient vectors") {
  ProfileBasis pb = build_profile_basis(2, 4);  // ell = 0,1,1,2,2,3,3,4,4
  std::vector<double> pure3(pb.funcs.size(), 0.0);
  pure3[5] = 0.7;
  CHECK(harmonic_distance(pure3, pb.ell, 3.0) == 0.0);

  std::vector<double> mixed(pb.funcs.size(), 0.0);
  mixed[3] = 1.0;  // ell = 2
  mixed[5] = 1.0;  // ell = 3
  CHECK(harmonic_distance(mixed, pb.ell, 3.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  // Scale invariance (normalization happens inside).
  for (auto& c : mixed) c *= 17.0;
  CHECK(harmonic_distance(mixed, pb.ell, 3.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  // Non-integer d: everything is off-family.
  CHECK(harmonic_distance(pure3, pb.ell, 2.5) == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS_AS(harmonic_distance({1.0, 0.0}, pb.ell, 3.0), std::invalid_argument);
}

TEST_CASE("classifier family elements expand with near-zero distance") {
  EllipticOperator F = EllipticOperator::linear(SymMatrix::identity(2));
  ClassificationReport rep = classify(F, 2, 3.0);
  REQUIRE(rep.kind == FamilyKind::HarmonicPolynomialFamily);
  ProfileBasis pb = build_profile_basis(2, 4);
  for (const auto& h : rep.basis) {
    std::vector<double> coefs(pb.funcs.size());
    for (size_t k = 0; k < pb.funcs.size(); ++k) coefs[k] = detail::sphere_ip(h, pb.funcs[k], 2);
    CHECK(harmonic_distance(coefs, pb.ell, 3.0) < 1e-10);
  }
}

TEST_CASE("hunt rejects invalid configurations") {
  HuntConfig cfg;
  cfg.op = EllipticOperator::special_lagrangian(2, 0.0);
  cfg.n = 2;
  cfg.d = 3.0;
  cfg.lmax = 2;  // below ceil(|d|)
  CHECK_THROWS_AS(hunt(cfg), ConfigInvalid);
  cfg.lmax = 4;
  cfg.seeds = 0;
  CHECK_THROWS_AS(hunt(cfg), ConfigInvalid);
  cfg.seeds = 1;
  cfg.n = 3;  // operator is 2-dimensional
  CHECK_THROWS_AS(hunt(cfg), ConfigInvalid);
}

TEST_CASE("special Lagrangian c=0, n=2, d=3 hunt recovers harmonic profiles") {
  HuntConfig cfg;
  cfg.op = EllipticOperator::special_lagrangian(2, 0.0);
  cfg.n = 2;
  cfg.d = 3.0;
  cfg.lmax = 4;
  cfg.seeds = 10;
  cfg.rng_seed = 7;
  auto results = hunt(cfg);
  REQUIRE(results.size() == 10);
  int good = 0;
  for (const auto& r : results) {
    CHECK(std::abs(detail::vec_norm(r.best_coefficients) - 1.0) <= 1e-12);
    CHECK_FALSE(r.exploratory);
    for (size_t i = 1; i < r.residual_trace.size(); ++i) CHECK(r.residual_trace[i] <= r.residual_trace[i - 1]);
    if (r.best_residual < 1e-6) {
      ++good;
      CHECK(r.distance_to_harmonic < 1e-3);
    }
  }
  CHECK(good >= 1);
}

TEST_CASE("Linear(I), n=3, d=3 hunt reaches a pure ell=3 profile") {
  HuntConfig cfg;
  cfg.op = EllipticOperator::linear(SymMatrix::identity(3));
  cfg.n = 3;
  cfg.d = 3.0;
  cfg.lmax = 3;
  cfg.seeds = 3;
  cfg.rng_seed = 11;
  auto results = hunt(cfg);
  double best = 1e300;
  for (const auto& r : results)
    if (r.best_residual < best) {
      best = r.best_residual;
      CHECK(r.distance_to_harmonic < 1e-3);
    }
  CHECK(best < 1e-8);
}

TEST_CASE("special Lagrangian c=0.5 is obstructed: residual bounded below") {
  HuntConfig cfg;
  cfg.op = EllipticOperator::special_lagrangian(2, 0.5);
  cfg.n = 2;
  cfg.d = 3.0;
  cfg.lmax = 4;
  cfg.seeds = 6;
  cfg.rng_seed = 3;
  auto results = hunt(cfg);
  // The residual stays bounded away from zero: c = 0.5 shifts the operator
  // value at every point where the profile Hessian is small. The infimum over
  // the full lmax=4 unit-coefficient sphere is ~0.1478 (a mix of the radial
  // ell=0 mode, whose Hessian has two positive eigenvalues and absorbs part
  // of the shift, with ell=3 modes); a coarse scan restricted to low-degree
  // coefficients suggests 0.2 but is not a valid bound for the full space.
  for (const auto& r : results) CHECK(r.best_residual >= 0.14);

  // Independent oracle: a coarse scan over random unit coefficient vectors
  // stays above every optimizer result, so the minima are real, not noise.
  ProfileBasis pb = build_profile_basis(2, 4);
  SampleSet scan_samples = SampleSet::annulus(2, 150, 9);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double scan_min = 1e300;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<double> c(pb.funcs.size());
    for (auto& v : c) v = gauss(rng);
    detail::normalize(c);
    DoublePoly phi(2);
    for (size_t k = 0; k < pb.funcs.size(); ++k) phi = phi + pb.funcs[k] * c[k];
    scan_min = std::min(scan_min, rms_residual(cfg.op, phi, 3.0, scan_samples));
  }
  double hunt_min = 1e300;
  for (const auto& r : results) hunt_min = std::min(hunt_min, r.best_residual);
  CHECK(scan_min >= hunt_min);
  CHECK(scan_min >= 0.14);
}

TEST_CASE("degree-2 hunts run but are flagged exploratory") {
  HuntConfig cfg;
  cfg.op = EllipticOperator::special_lagrangian(2, 0.0);
  cfg.n = 2;
  cfg.d = 2.0;
  cfg.lmax = 2;
  cfg.seeds = 1;
  cfg.max_iters = 40;
  auto results = hunt(cfg);
  REQUIRE(results.size() == 1);
  CHECK(results[0].exploratory);
}

TEST_CASE("hunts are bitwise reproducible for a fixed rng_seed") {
  HuntConfig cfg;
  cfg.op = EllipticOperator::special_lagrangian(2, 0.0);
  cfg.n = 2;
  cfg.d = 3.0;
  cfg.lmax = 3;
  cfg.seeds = 2;
  cfg.rng_seed = 99;
  cfg.max_iters = 120;
  auto a = hunt(cfg);
  auto b = hunt(cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].best_residual == b[i].best_residual);
    CHECK(a[i].best_coefficients == b[i].best_coefficients);
    CHECK(a[i].residual_trace == b[i].residual_trace);
    CHECK(a[i].distance_to_harmonic == b[i].distance_to_harmonic);
  }
}
