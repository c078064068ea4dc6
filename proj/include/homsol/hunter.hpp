#pragma once

#include "homsol/classifier.hpp"
#include "homsol/harmonic.hpp"
#include "homsol/operators.hpp"
#include "homsol/sphere.hpp"
#include "homsol/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace homsol {

class ConfigInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Exact integral of x^e over S^{n-1}: zero unless all exponents are even,
// else 2 prod_i Gamma((e_i+1)/2) / Gamma((|e|+n)/2).
inline double sphere_monomial_integral(const Expo& e, int n) {
  int total = 0;
  for (int k : e) {
    if (k % 2 != 0) return 0.0;
    total += k;
  }
  double lg = std::log(2.0);
  for (int i = 0; i < n; ++i) lg += std::lgamma((e[static_cast<size_t>(i)] + 1.0) / 2.0);
  lg -= std::lgamma((total + n) / 2.0);
  return std::exp(lg);
}

// Exact L^2(S^{n-1}) inner product of two polynomials (restriction to the
// sphere): expand the product and integrate monomial by monomial.
inline double sphere_ip(const DoublePoly& p, const DoublePoly& q, int n) {
  DoublePoly prod = p * q;
  double s = 0.0;
  const auto& terms = prod.terms();
  for (const auto& [e, c] : terms) s += c * sphere_monomial_integral(e, n);
  return s;
}

}  // namespace detail

// Restrictions of harmonic_basis(n, l) elements to the sphere for
// l = 0..lmax, orthonormalized in L^2(S^{n-1}) (modified Gram-Schmidt with
// exact monomial integrals). distance_to_harmonic is then a coordinate
// projection.
struct ProfileBasis {
  int n = 2;
  int lmax = 0;
  std::vector<DoublePoly> funcs;
  std::vector<int> ell;
};

inline ProfileBasis build_profile_basis(int n, int lmax) {
  ProfileBasis pb;
  pb.n = n;
  pb.lmax = lmax;
  for (int l = 0; l <= lmax; ++l) {
    for (const auto& h : harmonic_basis(n, l).elements) {
      DoublePoly v = h.to_double_poly();
      // Different-degree blocks are orthogonal exactly (harmonics of distinct
      // l), so only same-degree projections are removed; this keeps every
      // basis function exactly homogeneous of its degree.
      for (int pass = 0; pass < 2; ++pass)
        for (size_t j = 0; j < pb.funcs.size(); ++j) {
          if (pb.ell[j] != l) continue;
          double c = detail::sphere_ip(v, pb.funcs[j], n);
          v = v - pb.funcs[j] * c;
        }
      double nrm = std::sqrt(detail::sphere_ip(v, v, n));
      if (nrm < 1e-12) throw std::logic_error("build_profile_basis: degenerate basis element");
      pb.funcs.push_back(v * (1.0 / nrm));
      pb.ell.push_back(l);
    }
  }
  return pb;
}

// Euclidean norm of the coefficient components outside the l = d block,
// after unit normalization (A = I coordinates).
inline double harmonic_distance(const std::vector<double>& coefs, const std::vector<int>& ells, double d) {
  if (coefs.size() != ells.size()) throw std::invalid_argument("harmonic_distance: coefficient/basis size mismatch");
  double nrm2 = 0.0;
  for (double c : coefs) nrm2 += c * c;
  if (nrm2 <= 0.0) return 0.0;
  int di = static_cast<int>(std::lround(d));
  bool integral = std::abs(d - di) <= 1e-9;
  double off = 0.0;
  for (size_t k = 0; k < coefs.size(); ++k)
    if (!integral || ells[k] != di) off += coefs[k] * coefs[k];
  return std::sqrt(off / nrm2);
}

struct HuntConfig {
  EllipticOperator op;
  int n = 2;
  double d = 3.0;
  int lmax = 4;
  int seeds = 10;
  unsigned long long rng_seed = 1;
  int max_iters = 400;
  double tol_residual = 1e-12;
  double tol_step = 1e-12;
};

struct HuntResult {
  std::vector<double> best_coefficients;  // over the orthonormal profile basis
  double best_residual = 0.0;             // RMS of F(D^2 u) over the sample set
  std::vector<double> residual_trace;     // best-so-far per iteration
  double distance_to_harmonic = 0.0;
  bool exploratory = false;  // d = 2 runs, outside the theorem
};

namespace detail {

// FD Hessian (step 1e-4) of u(x) = |x|^d phi(x/|x|) at x.
inline SymMatrix profile_fd_hessian(const DoublePoly& phi, double d, const std::vector<double>& x) {
  int n = phi.nvars();
  auto eval_u = [&](const std::vector<double>& y) {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    double r = std::sqrt(r2);
    std::vector<double> th(y);
    for (auto& v : th) v /= r;
    return std::pow(r, d) * phi.eval(th);
  };
  constexpr double h = 1e-4;
  SymMatrix H(n);
  double f0 = eval_u(x);
  for (int i = 0; i < n; ++i) {
    auto xp = x, xm = x;
    xp[static_cast<size_t>(i)] += h;
    xm[static_cast<size_t>(i)] -= h;
    H.set(i, i, (eval_u(xp) - 2.0 * f0 + eval_u(xm)) / (h * h));
    for (int j = i + 1; j < n; ++j) {
      auto a = x, b = x, c = x, e = x;
      a[static_cast<size_t>(i)] += h;
      a[static_cast<size_t>(j)] += h;
      b[static_cast<size_t>(i)] -= h;
      b[static_cast<size_t>(j)] -= h;
      c[static_cast<size_t>(i)] += h;
      c[static_cast<size_t>(j)] -= h;
      e[static_cast<size_t>(i)] -= h;
      e[static_cast<size_t>(j)] += h;
      H.set(i, j, (eval_u(a) + eval_u(b) - eval_u(c) - eval_u(e)) / (4.0 * h * h));
    }
  }
  return H;
}

// Exact Hessian of u(x) = |x|^alpha * phi(x) for phi homogeneous of degree l
// (so u = |x|^d * phi(x/|x|) with alpha = d - l):
//   D^2 u = alpha(alpha-2) r^{a-4} phi xx^T + alpha r^{a-2} (phi I + x grad^T
//           + grad x^T) + r^alpha D^2 phi.
struct ProfileDerivs {
  DoublePoly phi;
  std::vector<DoublePoly> grad;
  std::vector<std::vector<DoublePoly>> hess;
  double alpha = 0.0;

  ProfileDerivs(const DoublePoly& p, double d, int ell) : phi(p), alpha(d - ell) {
    int n = p.nvars();
    for (int i = 0; i < n; ++i) grad.push_back(p.derivative(i));
    hess.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) hess[static_cast<size_t>(i)].push_back(grad[static_cast<size_t>(i)].derivative(j));
  }

  SymMatrix at(const std::vector<double>& x) const {
    int n = phi.nvars();
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    double ra = std::pow(r2, alpha / 2.0);
    double f = phi.eval(x);
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = grad[static_cast<size_t>(i)].eval(x);
    SymMatrix H(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        double xi = x[static_cast<size_t>(i)], xj = x[static_cast<size_t>(j)];
        double v = alpha * (alpha - 2.0) * ra / (r2 * r2) * f * xi * xj;
        v += alpha * ra / r2 * (xi * g[static_cast<size_t>(j)] + xj * g[static_cast<size_t>(i)] + (i == j ? f : 0.0));
        v += ra * hess[static_cast<size_t>(i)][static_cast<size_t>(j)].eval(x);
        H.set(i, j, v);
      }
    return H;
  }
};

inline double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline void normalize(std::vector<double>& v) {
  double n = vec_norm(v);
  if (n > 0) {
    for (auto& x : v) x /= n;
  }
}

// Distance to the harmonic family when DF(0) = A differs from I: pull the
// profile back by A^{1/2} and project onto the basis by grid quadrature
// (diagnostic accuracy, limited by the quadrature grid).
inline double pullback_distance(const std::vector<double>& coefs, const ProfileBasis& pb, const SymMatrix& A, double d) {
  SymMatrix I = SymMatrix::identity(A.n());
  if ((A - I).frobenius() <= 1e-9) return harmonic_distance(coefs, pb.ell, d);
  SymMatrix Ssq = spd_sqrt(A);
  SphereGrid grid = pb.n == 2 ? SphereGrid::circle(512) : SphereGrid::latlon(48, 96);
  size_t npts = grid.size();
  std::vector<double> ghat(npts), w(npts);
  for (size_t i = 0; i < npts; ++i) {
    auto th = grid.point(i);
    std::vector<double> y(th.size(), 0.0);
    for (int a = 0; a < A.n(); ++a)
      for (int b = 0; b < A.n(); ++b) y[static_cast<size_t>(a)] += Ssq(a, b) * th[static_cast<size_t>(b)];
    double r = vec_norm(y);
    std::vector<double> yth(y);
    for (auto& v : yth) v /= r;
    double g = 0.0;
    for (size_t k = 0; k < pb.funcs.size(); ++k) g += coefs[k] * pb.funcs[k].eval(yth);
    ghat[i] = std::pow(r, d) * g;
    w[i] = grid.weight(i);
  }
  double total = 0.0;
  for (size_t i = 0; i < npts; ++i) total += w[i] * ghat[i] * ghat[i];
  if (total <= 0.0) return 0.0;
  int di = static_cast<int>(std::lround(d));
  bool integral = std::abs(d - di) <= 1e-9;
  double inblock = 0.0;
  for (size_t k = 0; k < pb.funcs.size(); ++k) {
    if (!integral || pb.ell[k] != di) continue;
    double proj = 0.0;
    for (size_t i = 0; i < npts; ++i) proj += w[i] * ghat[i] * pb.funcs[k].eval(grid.point(i));
    inblock += proj * proj;
  }
  return std::sqrt(std::max(0.0, 1.0 - inblock / total));
}

}  // namespace detail

// Residual minimization over unit-norm profile coefficient vectors:
// derivative-free Nelder-Mead with one restart, then a finite-difference
// projected-gradient polish. Deterministic given rng_seed.
inline std::vector<HuntResult> hunt(const HuntConfig& cfg) {
  if (cfg.n != 2 && cfg.n != 3) throw ConfigInvalid("hunt: n must be 2 or 3");
  if (cfg.op.n != cfg.n) throw ConfigInvalid("hunt: operator dimension mismatch");
  if (cfg.seeds <= 0 || cfg.max_iters <= 0) throw ConfigInvalid("hunt: seeds and max_iters must be positive");
  if (cfg.lmax < static_cast<int>(std::ceil(std::abs(cfg.d))))
    throw ConfigInvalid("hunt: lmax must be at least ceil(|d|) so the predicted family is representable");

  ProfileBasis pb = build_profile_basis(cfg.n, cfg.lmax);
  size_t K = pb.funcs.size();
  SampleSet samples = SampleSet::annulus(cfg.n, 500, 42);

  // The Hessian of u is linear in the coefficients; precompute it per basis
  // function and sample point (closed form, no finite differences).
  std::vector<std::vector<SymMatrix>> hess(K);
  for (size_t k = 0; k < K; ++k) {
    detail::ProfileDerivs pd(pb.funcs[k], cfg.d, pb.ell[k]);
    hess[k].reserve(samples.points.size());
    for (const auto& x : samples.points) hess[k].push_back(pd.at(x));
  }

  auto objective = [&](const std::vector<double>& craw) {
    std::vector<double> c(craw);
    detail::normalize(c);
    double ss = 0.0;
    for (size_t s = 0; s < samples.points.size(); ++s) {
      SymMatrix H(cfg.n);
      for (size_t k = 0; k < K; ++k) H = H + hess[k][s] * c[k];
      double r = op_eval(cfg.op, H);
      ss += r * r;
    }
    return std::sqrt(ss / static_cast<double>(samples.points.size()));
  };

  SymMatrix A = linearize_at_zero(cfg.op);

  std::vector<HuntResult> results;
  for (int seed = 0; seed < cfg.seeds; ++seed) {
    std::mt19937_64 rng(cfg.rng_seed + 0x9e3779b97f4a7c15ull * static_cast<unsigned long long>(seed + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);

    HuntResult res;
    res.exploratory = std::abs(cfg.d - 2.0) <= 1e-9;
    std::vector<double> best(K, 0.0);
    double best_val = std::numeric_limits<double>::infinity();

    auto note = [&](const std::vector<double>& c, double v) {
      if (v < best_val) {
        best_val = v;
        best = c;
        detail::normalize(best);
      }
      res.residual_trace.push_back(best_val);
    };

    std::vector<double> start(K);
    for (auto& v : start) v = gauss(rng);
    detail::normalize(start);

    // Nelder-Mead with one restart around the incumbent.
    for (int phase = 0; phase < 2; ++phase) {
      double spread0 = phase == 0 ? 0.5 : 0.1;
      std::vector<std::vector<double>> simplex;
      std::vector<double> fval;
      std::vector<double> base = phase == 0 ? start : best;
      simplex.push_back(base);
      fval.push_back(objective(base));
      for (size_t k = 0; k < K; ++k) {
        auto p = base;
        p[k] += spread0;
        simplex.push_back(p);
        fval.push_back(objective(p));
      }
      note(simplex[0], fval[0]);
      int iters = cfg.max_iters / 2;
      for (int it = 0; it < iters; ++it) {
        // Order simplex.
        std::vector<size_t> idx(simplex.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fval[a] < fval[b]; });
        size_t lo = idx.front(), hi = idx.back(), hi2 = idx[idx.size() - 2];
        if (fval[hi] - fval[lo] < cfg.tol_step && fval[lo] < cfg.tol_residual) {
          note(simplex[lo], fval[lo]);
          break;
        }
        std::vector<double> centroid(K, 0.0);
        for (size_t i : idx)
          if (i != hi)
            for (size_t k = 0; k < K; ++k) centroid[k] += simplex[i][k] / static_cast<double>(K);
        auto combine = [&](double t) {
          std::vector<double> p(K);
          for (size_t k = 0; k < K; ++k) p[k] = centroid[k] + t * (centroid[k] - simplex[hi][k]);
          return p;
        };
        auto refl = combine(1.0);
        double fr = objective(refl);
        if (fr < fval[idx[0]]) {
          auto exp_p = combine(2.0);
          double fe = objective(exp_p);
          if (fe < fr) {
            simplex[hi] = exp_p;
            fval[hi] = fe;
          } else {
            simplex[hi] = refl;
            fval[hi] = fr;
          }
        } else if (fr < fval[hi2]) {
          simplex[hi] = refl;
          fval[hi] = fr;
        } else {
          auto con = combine(fr < fval[hi] ? 0.5 : -0.5);
          double fc = objective(con);
          if (fc < std::min(fr, fval[hi])) {
            simplex[hi] = con;
            fval[hi] = fc;
          } else {
            for (size_t i : idx)
              if (i != lo) {
                for (size_t k = 0; k < K; ++k) simplex[i][k] = 0.5 * (simplex[i][k] + simplex[lo][k]);
                fval[i] = objective(simplex[i]);
              }
          }
        }
        size_t cur = 0;
        for (size_t i = 1; i < fval.size(); ++i)
          if (fval[i] < fval[cur]) cur = i;
        note(simplex[cur], fval[cur]);
      }
    }

    // Levenberg-Marquardt polish: residuals r_s(c) = F(sum_k c_k H_ks) with
    // exact Jacobian J_sk = <DF(H(c)), H_ks>; steps are renormalized to the
    // unit sphere and only accepted if the RMS decreases.
    size_t ns = samples.points.size();
    double lm_lambda = 1e-3;
    for (int it = 0; it < 60 && best_val > cfg.tol_residual; ++it) {
      std::vector<double> resid(ns);
      std::vector<std::vector<double>> J(ns, std::vector<double>(K));
      for (size_t s = 0; s < ns; ++s) {
        SymMatrix H(cfg.n);
        for (size_t k = 0; k < K; ++k) H = H + hess[k][s] * best[k];
        resid[s] = op_eval(cfg.op, H);
        SymMatrix G = op_grad(cfg.op, H);
        for (size_t k = 0; k < K; ++k) J[s][k] = G.dot(hess[k][s]);
      }
      SymMatrix JtJ(static_cast<int>(K));
      std::vector<double> Jtr(K, 0.0);
      for (size_t a = 0; a < K; ++a) {
        for (size_t b = a; b < K; ++b) {
          double v = 0.0;
          for (size_t s = 0; s < ns; ++s) v += J[s][a] * J[s][b];
          JtJ.set(static_cast<int>(a), static_cast<int>(b), v);
        }
        for (size_t s = 0; s < ns; ++s) Jtr[a] += J[s][a] * resid[s];
      }
      bool accepted = false;
      for (int damp = 0; damp < 12; ++damp) {
        SymMatrix M = JtJ;
        for (size_t a = 0; a < K; ++a) M.add(static_cast<int>(a), static_cast<int>(a), lm_lambda);
        SpectralDecomposition eg = eig_sym(M);
        std::vector<double> delta(K, 0.0);
        for (size_t m = 0; m < K; ++m) {
          double proj = 0.0;
          for (size_t a = 0; a < K; ++a) proj += eg.vectors[m][a] * Jtr[a];
          proj /= eg.values[m];
          for (size_t a = 0; a < K; ++a) delta[a] += proj * eg.vectors[m][a];
        }
        std::vector<double> trial(K);
        for (size_t a = 0; a < K; ++a) trial[a] = best[a] - delta[a];
        detail::normalize(trial);
        double ft = objective(trial);
        if (ft < best_val) {
          best = trial;
          best_val = ft;
          lm_lambda = std::max(lm_lambda * 0.3, 1e-12);
          accepted = true;
          break;
        }
        lm_lambda *= 10.0;
      }
      res.residual_trace.push_back(best_val);
      if (!accepted) break;
    }

    detail::normalize(best);
    res.best_coefficients = best;
    res.best_residual = best_val;
    res.distance_to_harmonic = detail::pullback_distance(best, pb, A, cfg.d);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace homsol
