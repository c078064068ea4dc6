#pragma once

#include "homsol/harmonic.hpp"
#include "homsol/multinomial.hpp"
#include "homsol/symmatrix.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testutil {

using homsol::DoublePoly;
using homsol::Expo;
using homsol::SymMatrix;

inline std::vector<double> random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

// Uniform direction times a radius in [0.5, 2].
inline std::vector<double> random_annulus_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(static_cast<size_t>(n));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = g(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  } while (norm < 1e-8);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  double r = u(rng);
  for (auto& x : v) x *= r / norm;
  return v;
}

inline DoublePoly random_poly(std::mt19937_64& rng, int nvars, int max_degree) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> nterms(1, 8);
  DoublePoly p(nvars);
  int m = nterms(rng);
  for (int t = 0; t < m; ++t) {
    int d = deg(rng);
    Expo e(static_cast<size_t>(nvars), 0);
    std::uniform_int_distribution<int> pick(0, nvars - 1);
    for (int k = 0; k < d; ++k) e[static_cast<size_t>(pick(rng))] += 1;
    p.add_term(e, coeff(rng));
  }
  return p;
}

inline DoublePoly random_homogeneous_poly(std::mt19937_64& rng, int nvars, int degree) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  DoublePoly p(nvars);
  for (const auto& e : homsol::detail::monomials_of_degree(nvars, degree)) p.add_term(e, coeff(rng));
  return p;
}

inline SymMatrix random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, u(rng));
  return m;
}

// Random SPD via Q D Q^T with D in [0.5, 3].
inline SymMatrix random_spd(std::mt19937_64& rng, int n) {
  SymMatrix m = random_symmetric(rng, n);
  auto d = homsol::eig_sym(m);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  SymMatrix r(n);
  std::vector<double> vals(static_cast<size_t>(n));
  for (auto& v : vals) v = u(rng);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += vals[static_cast<size_t>(k)] * d.vectors[static_cast<size_t>(k)][static_cast<size_t>(i)] * d.vectors[static_cast<size_t>(k)][static_cast<size_t>(j)];
      r.set(i, j, s);
    }
  return r;
}

// Random orthogonal matrix from the eigenvectors of a random symmetric matrix.
inline std::vector<std::vector<double>> random_orthogonal(std::mt19937_64& rng, int n) {
  auto d = homsol::eig_sym(random_symmetric(rng, n));
  std::vector<std::vector<double>> q(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) q[static_cast<size_t>(i)][static_cast<size_t>(k)] = d.vectors[static_cast<size_t>(k)][static_cast<size_t>(i)];
  return q;
}

}  // namespace testutil
