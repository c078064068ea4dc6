#pragma once

#include "homsol/harmonic.hpp"
#include "homsol/multinomial.hpp"
#include "homsol/operators.hpp"
#include "homsol/symmatrix.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace homsol {

class DegreeTwoUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotElliptic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonC1AtZero : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// DF(0). All built-in kinds have analytic gradients; the finite-difference
// path with the Richardson check is kept as an independent oracle.
inline SymMatrix linearize_at_zero(const EllipticOperator& F) { return op_grad(F, SymMatrix(F.n)); }

inline SymMatrix linearize_at_zero_fd(const EllipticOperator& F) {
  SymMatrix zero(F.n);
  SymMatrix g1 = op_grad_fd(F, zero, 1e-3);
  SymMatrix g2 = op_grad_fd(F, zero, 1e-4);
  SymMatrix diff = g1 - g2;
  if (diff.frobenius() > 1e-5 * (1.0 + g2.frobenius()))
    throw NonC1AtZero("linearize_at_zero: Richardson check failed (steps 1e-3 vs 1e-4)");
  return g2;
}

// tr(A * D^2 p) as a polynomial.
inline DoublePoly linearized_residual_poly(const SymMatrix& A, const DoublePoly& p) {
  DoublePoly out(p.nvars());
  for (int i = 0; i < A.n(); ++i)
    for (int j = 0; j < A.n(); ++j) {
      DoublePoly dij = p.derivative(i).derivative(j);
      out = out + dij * A(i, j);
    }
  return out;
}

// {h(A^{-1/2} x) : h in harmonic_basis(n,d)}; every element solves
// tr(A D^2 p) = 0 as a polynomial identity.
inline std::vector<DoublePoly> candidate_basis(const SymMatrix& A, int n, int d) {
  SymMatrix S = spd_inv_sqrt(A);
  auto rows = to_rows(S);
  std::vector<DoublePoly> out;
  for (const auto& h : harmonic_basis(n, d).elements) out.push_back(h.to_double_poly().compose_linear(rows));
  return out;
}

enum class FamilyKind { NoSolutions, ZeroOnly, HarmonicPolynomialFamily, SingularHarmonicFamily };

inline const char* family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::NoSolutions: return "NoSolutions";
    case FamilyKind::ZeroOnly: return "ZeroOnly";
    case FamilyKind::HarmonicPolynomialFamily: return "HarmonicPolynomialFamily";
    case FamilyKind::SingularHarmonicFamily: return "SingularHarmonicFamily";
  }
  return "?";
}

struct ClassificationReport {
  SymMatrix linearization{2};  // A = DF(0)
  double mu_estimate = 0.0;    // smallest eigenvalue of A
  double f_at_zero = 0.0;
  FamilyKind kind = FamilyKind::ZeroOnly;
  std::string reason;                // NoSolutions cause or singular-family description
  std::vector<DoublePoly> basis;     // polynomial family, or the h-part of Kelvin profiles
  int ell = 0;                       // SingularHarmonicFamily spherical degree
  std::vector<double> diagnostics;   // per-element sup of the linearized residual
};

namespace detail {

// Sup over 20 deterministic annulus points of |tr(A D^2 p)| / (1+|D^2 p|_F).
inline double linearized_residual_sup(const SymMatrix& A, const DoublePoly& p, int points = 20) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> rad(0.5, 2.0);
  int n = A.n();
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    std::vector<double> x(static_cast<size_t>(n));
    double nrm = 0.0;
    for (auto& v : x) {
      v = gauss(rng);
      nrm += v * v;
    }
    nrm = std::sqrt(std::max(nrm, 1e-300));
    double r = rad(rng);
    for (auto& v : x) v *= r / nrm;
    SymMatrix H = poly_hessian_at(p, x);
    double tr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr += A(i, j) * H(i, j);
    worst = std::max(worst, std::abs(tr) / (1.0 + H.frobenius()));
  }
  return worst;
}

// FD residual of the Kelvin-type element u(x) = |y|^{2-n-2l} h(y), y = Sx,
// against tr(A D^2 u) = 0.
inline double singular_residual_sup(const SymMatrix& A, const SymMatrix& S, const DoublePoly& h, int l, int points = 100) {
  int n = A.n();
  auto eval_u = [&](const std::vector<double>& x) {
    std::vector<double> y(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[static_cast<size_t>(i)] += S(i, j) * x[static_cast<size_t>(j)];
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    return std::pow(r2, 0.5 * (2 - n - 2 * l)) * h.eval(y);
  };
  std::mt19937_64 rng(4321);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> rad(0.5, 2.0);
  constexpr double fd = 1e-4;
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    std::vector<double> x(static_cast<size_t>(n));
    double nrm = 0.0;
    for (auto& v : x) {
      v = gauss(rng);
      nrm += v * v;
    }
    nrm = std::sqrt(std::max(nrm, 1e-300));
    double r = rad(rng);
    for (auto& v : x) v *= r / nrm;
    SymMatrix H(n);
    double f0 = eval_u(x);
    for (int i = 0; i < n; ++i) {
      auto xp = x, xm = x;
      xp[static_cast<size_t>(i)] += fd;
      xm[static_cast<size_t>(i)] -= fd;
      H.set(i, i, (eval_u(xp) - 2.0 * f0 + eval_u(xm)) / (fd * fd));
      for (int j = i + 1; j < n; ++j) {
        auto a = x, b = x, c = x, dpt = x;
        a[static_cast<size_t>(i)] += fd;
        a[static_cast<size_t>(j)] += fd;
        b[static_cast<size_t>(i)] -= fd;
        b[static_cast<size_t>(j)] -= fd;
        c[static_cast<size_t>(i)] += fd;
        c[static_cast<size_t>(j)] -= fd;
        dpt[static_cast<size_t>(i)] -= fd;
        dpt[static_cast<size_t>(j)] += fd;
        H.set(i, j, (eval_u(a) + eval_u(b) - eval_u(c) - eval_u(dpt)) / (4.0 * fd * fd));
      }
    }
    double tr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr += A(i, j) * H(i, j);
    worst = std::max(worst, std::abs(tr) / (1.0 + H.frobenius()));
  }
  return worst;
}

}  // namespace detail

// The theorem as a pipeline. d = 2 is a hard error; F(0) must vanish;
// DF(0) must be positive definite; then the degree gates decide between the
// zero solution, the harmonic polynomial family in A^{-1/2} coordinates,
// and (for integer d <= -(n-2)) the Kelvin-type singular family.
inline ClassificationReport classify(const EllipticOperator& F, int n, double d, double f0_tol = 1e-12) {
  if (F.n != n) throw std::invalid_argument("classify: operator dimension mismatch");
  if (std::abs(d - 2.0) <= 1e-9) throw DegreeTwoUnsupported("classify: d = 2 is not covered by the theorem");
  ClassificationReport rep;
  rep.f_at_zero = check_f_at_zero(F);
  if (std::abs(rep.f_at_zero) > f0_tol) {
    rep.kind = FamilyKind::NoSolutions;
    rep.reason = "F(0) != 0: existence of a homogeneous solution forces F(0) = 0";
    rep.linearization = SymMatrix(n);
    return rep;
  }
  rep.linearization = linearize_at_zero(F);
  auto dec = eig_sym(rep.linearization);
  rep.mu_estimate = dec.values.front();
  if (rep.mu_estimate <= 0.0) throw NotElliptic("classify: DF(0) is not positive definite");

  double rd = std::round(d);
  bool is_integer = std::abs(d - rd) <= 1e-9;
  if (!is_integer || (d > -(n - 2.0) && d < 0.0)) {
    rep.kind = FamilyKind::ZeroOnly;
    rep.reason = is_integer ? "-(n-2) < d < 0: only the zero solution" : "non-integer degree: only the zero solution";
    return rep;
  }
  int di = static_cast<int>(rd);
  if (di >= 0) {
    rep.kind = FamilyKind::HarmonicPolynomialFamily;
    rep.basis = candidate_basis(rep.linearization, n, di);
    for (const auto& p : rep.basis) rep.diagnostics.push_back(detail::linearized_residual_sup(rep.linearization, p));
    return rep;
  }
  // Integer d <= -(n-2): Kelvin-type profiles r^{2-n-2l} h, l = 2-n-d, in
  // the same new coordinates. Not asserted by the theorem's closing
  // sentence; reported as the linearized-equation family.
  rep.kind = FamilyKind::SingularHarmonicFamily;
  rep.ell = 2 - n - di;
  rep.reason = "outside-theorem-statement: Kelvin profiles |y|^{2-n-2l} h(y), y = A^{-1/2} x, l = " + std::to_string(rep.ell);
  SymMatrix S = spd_inv_sqrt(rep.linearization);
  for (const auto& h : harmonic_basis(n, rep.ell).elements) {
    DoublePoly hd = h.to_double_poly();
    rep.basis.push_back(hd);
    rep.diagnostics.push_back(detail::singular_residual_sup(rep.linearization, S, hd, rep.ell));
  }
  return rep;
}

}  // namespace homsol
