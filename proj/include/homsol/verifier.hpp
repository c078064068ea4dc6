#pragma once

#include "homsol/homogeneous.hpp"
#include "homsol/operators.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace homsol {

// Deterministic annulus sample set, radii in [0.5, 2].
struct SampleSet {
  std::vector<std::vector<double>> points;
  unsigned long long seed = 42;
  int count = 1000;

  static SampleSet annulus(int n, int count = 1000, unsigned long long seed = 42) {
    SampleSet s;
    s.seed = seed;
    s.count = count;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> rad(0.5, 2.0);
    for (int k = 0; k < count; ++k) {
      std::vector<double> x(static_cast<size_t>(n));
      double nrm = 0.0;
      do {
        nrm = 0.0;
        for (auto& v : x) {
          v = gauss(rng);
          nrm += v * v;
        }
        nrm = std::sqrt(nrm);
      } while (nrm < 1e-8);
      double r = rad(rng);
      for (auto& v : x) v *= r / nrm;
      s.points.push_back(std::move(x));
    }
    return s;
  }

  // Unit-vector samples (annulus points radially projected to the sphere).
  static SampleSet unit_sphere(int n, int count = 1000, unsigned long long seed = 42) {
    SampleSet s = annulus(n, count, seed);
    for (auto& x : s.points) {
      double nrm = 0.0;
      for (double v : x) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (auto& v : x) v /= nrm;
    }
    return s;
  }
};

struct CheckEntry {
  bool pass = false;
  double magnitude = 0.0;
};

struct ResidualReport {
  double sup_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<double> worst_point;
  std::map<std::string, CheckEntry> per_check;

  bool operator==(const ResidualReport& o) const {
    if (sup_residual != o.sup_residual || mean_residual != o.mean_residual || worst_point != o.worst_point) return false;
    if (per_check.size() != o.per_check.size()) return false;
    for (auto a = per_check.begin(), b = o.per_check.begin(); a != per_check.end(); ++a, ++b)
      if (a->first != b->first || a->second.pass != b->second.pass || a->second.magnitude != b->second.magnitude) return false;
    return true;
  }
};

// sup/mean over the samples of |F(D^2 u)|.
inline ResidualReport residual_sup(const HomogeneousFunction& u, const EllipticOperator& F, const SampleSet& s) {
  if (u.n != F.n) throw std::invalid_argument("residual_sup: dimension mismatch");
  ResidualReport rep;
  double total = 0.0;
  for (const auto& x : s.points) {
    double r = std::abs(op_eval(F, hessian_homogeneous(u, x)));
    total += r;
    if (r >= rep.sup_residual) {
      rep.sup_residual = r;
      rep.worst_point = x;
    }
  }
  rep.mean_residual = s.points.empty() ? 0.0 : total / static_cast<double>(s.points.size());
  rep.per_check["equation_residual"] = {rep.sup_residual <= 1e-9, rep.sup_residual};
  rep.per_check["f_at_zero"] = {std::abs(check_f_at_zero(F)) <= 1e-12, std::abs(check_f_at_zero(F))};
  return rep;
}

// max over samples and t in {0.5, 2} of |u(t x) - t^d u(x)| / (1 + |u(x)|).
inline ResidualReport verify_homogeneity(const HomogeneousFunction& u, double d, const SampleSet& s) {
  ResidualReport rep;
  double total = 0.0;
  for (const auto& x : s.points) {
    double ux = eval_extension(u, x);
    double worst = 0.0;
    for (double t : {0.5, 2.0}) {
      std::vector<double> tx(x);
      for (auto& v : tx) v *= t;
      worst = std::max(worst, std::abs(eval_extension(u, tx) - std::pow(t, d) * ux) / (1.0 + std::abs(ux)));
    }
    total += worst;
    if (worst >= rep.sup_residual) {
      rep.sup_residual = worst;
      rep.worst_point = x;
    }
  }
  rep.mean_residual = s.points.empty() ? 0.0 : total / static_cast<double>(s.points.size());
  rep.per_check["homogeneity"] = {rep.sup_residual <= 1e-10, rep.sup_residual};
  return rep;
}

// sup over samples of |tr(A D^2 u)| / (1 + |D^2 u|_F). The per_check entry
// "raw_trace" carries the unnormalized worst trace magnitude.
inline ResidualReport verify_linearized(const HomogeneousFunction& u, const SymMatrix& A, const SampleSet& s) {
  if (u.n != A.n()) throw std::invalid_argument("verify_linearized: dimension mismatch");
  ResidualReport rep;
  double total = 0.0, raw_worst = 0.0;
  for (const auto& x : s.points) {
    SymMatrix H = hessian_homogeneous(u, x);
    double tr = 0.0;
    for (int i = 0; i < A.n(); ++i)
      for (int j = 0; j < A.n(); ++j) tr += A(i, j) * H(i, j);
    double r = std::abs(tr) / (1.0 + H.frobenius());
    raw_worst = std::max(raw_worst, std::abs(tr));
    total += r;
    if (r >= rep.sup_residual) {
      rep.sup_residual = r;
      rep.worst_point = x;
    }
  }
  rep.mean_residual = s.points.empty() ? 0.0 : total / static_cast<double>(s.points.size());
  rep.per_check["linearized"] = {rep.sup_residual <= 1e-9, rep.sup_residual};
  rep.per_check["raw_trace"] = {raw_worst <= 1e-9, raw_worst};
  return rep;
}

// sup over unit-vector samples of |Delta_S g + lambda g|, lambda = d(d+n-2).
inline ResidualReport verify_eigen_relation(const HomogeneousFunction& u, const SampleSet& s_theta) {
  // Precondition: harmonic profile. Checkable exactly for polynomials.
  if (const auto* pp = std::get_if<PolynomialProfile>(&u.profile)) {
    DoublePoly lap = pp->p.laplacian();
    auto terms = lap.terms();
    for (const auto& [e, c] : terms)
      if (std::abs(c) > 1e-8) throw std::invalid_argument("verify_eigen_relation: profile polynomial is not harmonic");
  }
  ResidualReport rep;
  double total = 0.0;
  for (const auto& th : s_theta.points) {
    auto sp = laplace_split(u, th);
    double r = std::abs(sp.spherical_term + sp.radial_term);
    total += r;
    if (r >= rep.sup_residual) {
      rep.sup_residual = r;
      rep.worst_point = th;
    }
  }
  rep.mean_residual = s_theta.points.empty() ? 0.0 : total / static_cast<double>(s_theta.points.size());
  rep.per_check["eigen_relation"] = {rep.sup_residual <= 1e-6, rep.sup_residual};
  return rep;
}

}  // namespace homsol
