#pragma once

#include "homsol/harmonic.hpp"
#include "homsol/multinomial.hpp"
#include "homsol/sphere.hpp"
#include "homsol/symmatrix.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

namespace homsol {

class OriginEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StencilOutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotUnitVector : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Profile given by a homogeneous polynomial; u(x) = p(x) on all of R^n.
struct PolynomialProfile {
  DoublePoly p;
};

// Profile sampled on a sphere grid; evaluated by (bi)linear interpolation.
struct GridProfile {
  SphereGrid grid;
  std::vector<double> values;
};

// Profile as coefficients over restricted harmonic polynomials, blocks of
// degree l = 0..lmax (n = 2: equivalent to Fourier modes on the circle).
struct CoefProfile {
  int n = 2;
  int lmax = 0;
  std::vector<double> coef;
  std::vector<DoublePoly> basis;
  std::vector<int> ell;  // spherical degree of each basis element

  static CoefProfile build(int n, int lmax, std::vector<double> coefficients) {
    CoefProfile cp;
    cp.n = n;
    cp.lmax = lmax;
    for (int l = 0; l <= lmax; ++l) {
      auto hb = harmonic_basis(n, l);
      for (const auto& h : hb.elements) {
        cp.basis.push_back(h.to_double_poly());
        cp.ell.push_back(l);
      }
    }
    if (coefficients.empty()) coefficients.assign(cp.basis.size(), 0.0);
    if (coefficients.size() != cp.basis.size())
      throw std::invalid_argument("CoefProfile: coefficient count does not match basis size");
    cp.coef = std::move(coefficients);
    return cp;
  }
};

using Profile = std::variant<PolynomialProfile, GridProfile, CoefProfile>;

namespace detail {

// Interpolate a grid profile at a unit vector. Latitude is clamped to the
// covered band; longitude is periodic.
inline double grid_interpolate(const GridProfile& gp, const std::vector<double>& theta_pt) {
  const SphereGrid& grid = gp.grid;
  if (grid.n == 2) {
    double phi = std::atan2(theta_pt[1], theta_pt[0]);
    if (phi < 0) phi += 2.0 * std::numbers::pi;
    double s = phi / (2.0 * std::numbers::pi) * grid.m;
    int i0 = static_cast<int>(std::floor(s));
    double b = s - i0;
    i0 %= grid.m;
    int i1 = (i0 + 1) % grid.m;
    return (1.0 - b) * gp.values[static_cast<size_t>(i0)] + b * gp.values[static_cast<size_t>(i1)];
  }
  double z = std::max(-1.0, std::min(1.0, theta_pt[2]));
  double th = std::acos(z);
  double phi = std::atan2(theta_pt[1], theta_pt[0]);
  if (phi < 0) phi += 2.0 * std::numbers::pi;
  double dth = std::numbers::pi / grid.nlat;
  double t = th / dth - 0.5;
  int j0 = static_cast<int>(std::floor(t));
  double a = t - j0;
  if (j0 < 0) {
    j0 = 0;
    a = 0.0;
  }
  if (j0 >= grid.nlat - 1) {
    j0 = grid.nlat - 2;
    a = 1.0;
  }
  double s = phi / (2.0 * std::numbers::pi) * grid.nlon;
  int i0 = static_cast<int>(std::floor(s));
  double b = s - i0;
  i0 %= grid.nlon;
  int i1 = (i0 + 1) % grid.nlon;
  auto at = [&](int j, int i) { return gp.values[static_cast<size_t>(j) * grid.nlon + static_cast<size_t>(i)]; };
  return (1.0 - a) * ((1.0 - b) * at(j0, i0) + b * at(j0, i1)) + a * ((1.0 - b) * at(j0 + 1, i0) + b * at(j0 + 1, i1));
}

inline double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

// u(x) = |x|^d g(x/|x|). The declared degree is not forced to match the
// profile (euler_identity_residual diagnoses mismatches).
struct HomogeneousFunction {
  int n = 2;
  double degree = 0.0;
  Profile profile;

  static HomogeneousFunction from_polynomial(const DoublePoly& p) {
    if (!p.is_homogeneous()) throw std::invalid_argument("HomogeneousFunction: profile polynomial must be homogeneous");
    return HomogeneousFunction{p.nvars(), static_cast<double>(p.degree()), PolynomialProfile{p}};
  }
  static HomogeneousFunction from_polynomial(const RationalPoly& p) { return from_polynomial(p.to_double_poly()); }

  static HomogeneousFunction from_grid(double d, GridProfile gp) {
    int n = gp.grid.n;
    return HomogeneousFunction{n, d, std::move(gp)};
  }

  static HomogeneousFunction from_coef(double d, CoefProfile cp) {
    int n = cp.n;
    return HomogeneousFunction{n, d, std::move(cp)};
  }

  // Profile value g(theta) at a unit vector.
  double profile_eval(const std::vector<double>& theta) const {
    if (const auto* pp = std::get_if<PolynomialProfile>(&profile)) return pp->p.eval(theta);
    if (const auto* gp = std::get_if<GridProfile>(&profile)) return detail::grid_interpolate(*gp, theta);
    const auto& cp = std::get<CoefProfile>(profile);
    double s = 0.0;
    for (size_t i = 0; i < cp.basis.size(); ++i) s += cp.coef[i] * cp.basis[i].eval(theta);
    return s;
  }
};

// Radial/spherical split of the Laplacian of u at a unit vector.
struct LaplaceSplit {
  double lambda = 0.0;          // d(d+n-2)
  double radial_term = 0.0;     // lambda * g(theta)
  double spherical_term = 0.0;  // (Delta_S g)(theta)
};

inline double eval_extension(const HomogeneousFunction& u, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != u.n) throw std::invalid_argument("eval_extension: dimension mismatch");
  double r = detail::norm2(x);
  if (r < 1e-14) throw OriginEvaluation("eval_extension: |x| below 1e-14");
  // Polynomial profiles evaluate directly; this equals |x|^d g(x/|x|) when
  // the declared degree matches the polynomial, and makes a mismatch
  // visible to euler_identity_residual when it does not.
  if (const auto* pp = std::get_if<PolynomialProfile>(&u.profile)) return pp->p.eval(x);
  std::vector<double> theta(x.size());
  for (size_t i = 0; i < x.size(); ++i) theta[i] = x[i] / r;
  return std::pow(r, u.degree) * u.profile_eval(theta);
}

// D^2 u(x) = |x|^{d-2} D^2 u(x/|x|): exact for polynomial profiles, central
// finite differences (step 1e-4) of the radial extension otherwise.
inline SymMatrix hessian_homogeneous(const HomogeneousFunction& u, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != u.n) throw std::invalid_argument("hessian_homogeneous: dimension mismatch");
  double r = detail::norm2(x);
  if (r < 1e-14) throw OriginEvaluation("hessian_homogeneous: |x| below 1e-14");
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] / r;
  double scale = std::pow(r, u.degree - 2.0);

  if (const auto* pp = std::get_if<PolynomialProfile>(&u.profile)) {
    SymMatrix H = poly_hessian_at(pp->p, y);
    return H * scale;
  }

  constexpr double h = 1e-4;
  if (const auto* gp = std::get_if<GridProfile>(&u.profile); gp && gp->grid.n == 3) {
    // The finite-difference stencil must stay inside the covered latitude
    // band (no grid point sits on the poles).
    double th = std::acos(std::max(-1.0, std::min(1.0, y[2])));
    double margin = gp->grid.theta(0) + 4.0 * h;
    if (th < margin || th > std::numbers::pi - margin)
      throw StencilOutOfRange("hessian_homogeneous: stencil crosses the polar cap of the grid profile");
  }
  int n = u.n;
  SymMatrix H(n);
  double f0 = eval_extension(u, y);
  for (int i = 0; i < n; ++i) {
    std::vector<double> yp = y, ym = y;
    yp[static_cast<size_t>(i)] += h;
    ym[static_cast<size_t>(i)] -= h;
    H.set(i, i, (eval_extension(u, yp) - 2.0 * f0 + eval_extension(u, ym)) / (h * h));
    for (int j = i + 1; j < n; ++j) {
      std::vector<double> a = y, b = y, c = y, d = y;
      a[static_cast<size_t>(i)] += h;
      a[static_cast<size_t>(j)] += h;
      b[static_cast<size_t>(i)] -= h;
      b[static_cast<size_t>(j)] -= h;
      c[static_cast<size_t>(i)] += h;
      c[static_cast<size_t>(j)] -= h;
      d[static_cast<size_t>(i)] -= h;
      d[static_cast<size_t>(j)] += h;
      H.set(i, j, (eval_extension(u, a) + eval_extension(u, b) - eval_extension(u, c) - eval_extension(u, d)) / (4.0 * h * h));
    }
  }
  return H * scale;
}

inline LaplaceSplit laplace_split(const HomogeneousFunction& u, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != u.n) throw std::invalid_argument("laplace_split: dimension mismatch");
  if (std::abs(detail::norm2(theta) - 1.0) > 1e-12) throw NotUnitVector("laplace_split: |theta| must be 1 within 1e-12");
  LaplaceSplit out;
  out.lambda = u.degree * (u.degree + u.n - 2.0);
  double g = u.profile_eval(theta);
  out.radial_term = out.lambda * g;
  if (const auto* pp = std::get_if<PolynomialProfile>(&u.profile)) {
    // Delta_S g = Delta u - lambda g on the unit sphere.
    DoublePoly lap = pp->p.laplacian();
    out.spherical_term = lap.eval(theta) - out.radial_term;
  } else if (const auto* cp = std::get_if<CoefProfile>(&u.profile)) {
    // Restricted degree-l harmonics are Laplace-Beltrami eigenfunctions
    // with eigenvalue -l(l+n-2).
    double s = 0.0;
    for (size_t i = 0; i < cp->basis.size(); ++i) {
      double l = cp->ell[i];
      s -= l * (l + u.n - 2.0) * cp->coef[i] * cp->basis[i].eval(theta);
    }
    out.spherical_term = s;
  } else {
    const auto& gp = std::get<GridProfile>(u.profile);
    DiscreteLB lb = build_lb(gp.grid);
    GridProfile lg{gp.grid, lb.apply(gp.values)};
    out.spherical_term = detail::grid_interpolate(lg, theta);
  }
  return out;
}

// |x . grad u(x) - d u(x)|, gradient by central differences with step 1e-5.
inline double euler_identity_residual(const HomogeneousFunction& u, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != u.n) throw std::invalid_argument("euler_identity_residual: dimension mismatch");
  double r = detail::norm2(x);
  if (r < 1e-14) throw OriginEvaluation("euler_identity_residual: |x| below 1e-14");
  constexpr double h = 1e-5;
  double dot = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    std::vector<double> xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    dot += x[i] * (eval_extension(u, xp) - eval_extension(u, xm)) / (2.0 * h);
  }
  return std::abs(dot - u.degree * eval_extension(u, x));
}

}  // namespace homsol
