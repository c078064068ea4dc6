#pragma once

#include "homsol/multinomial.hpp"
#include "homsol/rational.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace homsol {

class NotHomogeneous : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// All exponent vectors of total degree d in n variables, graded-lex
// descending (same order the Multinomial term map iterates in).
inline std::vector<Expo> monomials_of_degree(int n, int d) {
  std::vector<Expo> out;
  Expo e(static_cast<size_t>(n), 0);
  auto rec = [&](auto&& self, int var, int rem) -> void {
    if (var == n - 1) {
      e[static_cast<size_t>(var)] = rem;
      out.push_back(e);
      return;
    }
    for (int k = rem; k >= 0; --k) {
      e[static_cast<size_t>(var)] = k;
      self(self, var + 1, rem - k);
    }
    e[static_cast<size_t>(var)] = 0;
  };
  if (d >= 0 && n >= 1) rec(rec, 0, d);
  return out;
}

// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<int> rref(std::vector<std::vector<Rational>>& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t pr = r;
    while (pr < rows && m[pr][c] == 0) ++pr;
    if (pr == rows) continue;
    std::swap(m[r], m[pr]);
    Rational inv = Rational(1) / m[r][c];
    for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(static_cast<int>(c));
    ++r;
  }
  return pivots;
}

// Exact solve of a nonsingular square system.
inline std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  size_t n = a.size();
  for (size_t i = 0; i < n; ++i) a[i].push_back(b[i]);
  rref(a);
  std::vector<Rational> x(n);
  for (size_t i = 0; i < n; ++i) {
    if (a[i][i] == 0) throw std::runtime_error("solve_exact: singular system");
    x[i] = a[i][n];
  }
  return x;
}

inline Rational factorial(int k) {
  BigInt f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

// Bombieri weight alpha!/d! for a degree-d monomial.
inline Rational bombieri_weight(const Expo& e) {
  BigInt num = 1;
  for (int k : e)
    for (int i = 2; i <= k; ++i) num *= i;
  BigInt den = 1;
  for (int i = 2; i <= expo_degree(e); ++i) den *= i;
  return Rational(num, den);
}

}  // namespace detail

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// dim of homogeneous harmonic polynomials of degree d in n variables.
inline long long harmonic_dimension(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("harmonic_dimension: need n >= 1, d >= 0");
  long long full = binomial(n + d - 1, n - 1);
  long long lower = d >= 2 ? binomial(n + d - 3, n - 1) : 0;
  return full - lower;
}

struct HarmonicBasis {
  int n = 0;
  int d = 0;
  std::vector<RationalPoly> elements;
};

// Exact kernel of the Laplacian from degree-d homogeneous polynomials to
// degree-(d-2), canonicalized by RREF in graded-lex monomial coordinates.
inline HarmonicBasis harmonic_basis(int n, int d) {
  if (n < 2 || d < 0) throw std::invalid_argument("harmonic_basis: need n >= 2, d >= 0");
  HarmonicBasis out{n, d, {}};
  std::vector<Expo> src = detail::monomials_of_degree(n, d);
  if (d < 2) {
    // Laplacian is identically zero on degrees 0 and 1.
    for (const auto& e : src) out.elements.push_back(RationalPoly::monomial(n, e, Rational(1)));
    return out;
  }
  std::vector<Expo> tgt = detail::monomials_of_degree(n, d - 2);
  std::map<Expo, size_t, GrlexDesc> tgt_index;
  for (size_t i = 0; i < tgt.size(); ++i) tgt_index[tgt[i]] = i;

  // Column j holds the Laplacian of the j-th source monomial.
  std::vector<std::vector<Rational>> m(tgt.size(), std::vector<Rational>(src.size(), Rational(0)));
  for (size_t j = 0; j < src.size(); ++j) {
    RationalPoly lap = RationalPoly::monomial(n, src[j], Rational(1)).laplacian();
    for (const auto& [e, c] : lap.terms()) m[tgt_index.at(e)][j] = c;
  }
  std::vector<int> pivots = detail::rref(m);
  std::vector<bool> is_pivot(src.size(), false);
  for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;

  // Kernel vectors from free columns.
  std::vector<std::vector<Rational>> kernel;
  for (size_t f = 0; f < src.size(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(src.size(), Rational(0));
    v[f] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[static_cast<size_t>(pivots[r])] = -m[r][f];
    kernel.push_back(std::move(v));
  }
  detail::rref(kernel);
  for (const auto& v : kernel) {
    RationalPoly p(n);
    for (size_t j = 0; j < src.size(); ++j) p.add_term(src[j], v[j]);
    out.elements.push_back(std::move(p));
  }
  return out;
}

// Orthogonal projection onto the harmonic subspace of p's degree, under the
// Bombieri inner product <x^a, x^a> = a!/d!.
inline RationalPoly project_to_harmonic(const RationalPoly& p) {
  if (!p.is_homogeneous()) throw NotHomogeneous("project_to_harmonic: polynomial mixes degrees");
  if (p.is_zero()) return p;
  int d = p.degree();
  HarmonicBasis basis = harmonic_basis(p.nvars(), d);
  std::vector<Expo> mons = detail::monomials_of_degree(p.nvars(), d);
  std::vector<Rational> weights(mons.size());
  for (size_t i = 0; i < mons.size(); ++i) weights[i] = detail::bombieri_weight(mons[i]);

  auto coords = [&](const RationalPoly& q) {
    std::vector<Rational> v(mons.size(), Rational(0));
    for (size_t i = 0; i < mons.size(); ++i) v[i] = q.coeff(mons[i]);
    return v;
  };
  auto inner = [&](const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * weights[i];
    return s;
  };

  size_t k = basis.elements.size();
  std::vector<std::vector<Rational>> hv;
  hv.reserve(k);
  for (const auto& h : basis.elements) hv.push_back(coords(h));
  std::vector<Rational> pv = coords(p);

  std::vector<std::vector<Rational>> gram(k, std::vector<Rational>(k));
  std::vector<Rational> rhs(k);
  for (size_t i = 0; i < k; ++i) {
    rhs[i] = inner(hv[i], pv);
    for (size_t j = 0; j < k; ++j) gram[i][j] = inner(hv[i], hv[j]);
  }
  std::vector<Rational> c = detail::solve_exact(std::move(gram), std::move(rhs));
  RationalPoly out(p.nvars());
  for (size_t i = 0; i < k; ++i) out = out + basis.elements[i] * c[i];
  return out;
}

}  // namespace homsol
