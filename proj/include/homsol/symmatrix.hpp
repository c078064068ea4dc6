#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace homsol {

// Dense symmetric n x n matrix. Storage is the full square, kept symmetric
// by construction; set() writes both (i,j) and (j,i).
class SymMatrix {
 public:
  SymMatrix() : n_(0) {}
  explicit SymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
    if (n < 0) throw std::invalid_argument("SymMatrix: negative dimension");
  }

  static SymMatrix identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
  }

  static SymMatrix diag(const std::vector<double>& d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, d[static_cast<size_t>(i)]);
    return m;
  }

  int n() const { return n_; }

  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  void set(int i, int j, double v) {
    a_[static_cast<size_t>(i) * n_ + j] = v;
    a_[static_cast<size_t>(j) * n_ + i] = v;
  }

  void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  bool finite() const {
    for (double v : a_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  SymMatrix operator+(const SymMatrix& o) const {
    check_dim(o);
    SymMatrix r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
  }

  SymMatrix operator-(const SymMatrix& o) const {
    check_dim(o);
    SymMatrix r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
    return r;
  }

  SymMatrix operator*(double s) const {
    SymMatrix r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
    return r;
  }

  // tr(A*B) for symmetric A, B; equals sum_{ij} A_ij B_ij.
  double dot(const SymMatrix& o) const {
    check_dim(o);
    double s = 0.0;
    for (size_t k = 0; k < a_.size(); ++k) s += a_[k] * o.a_[k];
    return s;
  }

 private:
  void check_dim(const SymMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
  }

  int n_;
  std::vector<double> a_;
};

struct SpectralDecomposition {
  std::vector<double> values;              // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] is the eigenvector for values[k]

  SymMatrix reconstruct() const {
    int n = static_cast<int>(values.size());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += values[static_cast<size_t>(k)] * vectors[static_cast<size_t>(k)][static_cast<size_t>(i)] * vectors[static_cast<size_t>(k)][static_cast<size_t>(j)];
        m.set(i, j, s);
      }
    return m;
  }
};

class EigNonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSPD : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cyclic Jacobi sweeps. Terminates when the off-diagonal Frobenius norm drops
// below 1e-12 * ||M||_F; throws after 50 sweeps.
inline SpectralDecomposition eig_sym(const SymMatrix& m) {
  if (!m.finite()) throw std::invalid_argument("eig_sym: non-finite entries");
  const int n = m.n();
  std::vector<std::vector<double>> a(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
  std::vector<std::vector<double>> q(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    q[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
  }
  const double norm = m.frobenius();
  auto offdiag = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a[static_cast<size_t>(i)][static_cast<size_t>(j)] * a[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return std::sqrt(s);
  };
  const int max_sweeps = 50;
  int sweep = 0;
  while (offdiag() > 1e-12 * norm && norm > 0.0) {
    if (++sweep > max_sweeps) throw EigNonConvergence("eig_sym: no convergence in 50 sweeps");
    for (int p = 0; p < n - 1; ++p)
      for (int qq = p + 1; qq < n; ++qq) {
        double apq = a[static_cast<size_t>(p)][static_cast<size_t>(qq)];
        if (apq == 0.0) continue;
        double theta = (a[static_cast<size_t>(qq)][static_cast<size_t>(qq)] - a[static_cast<size_t>(p)][static_cast<size_t>(p)]) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[static_cast<size_t>(k)][static_cast<size_t>(p)];
          double akq = a[static_cast<size_t>(k)][static_cast<size_t>(qq)];
          a[static_cast<size_t>(k)][static_cast<size_t>(p)] = c * akp - s * akq;
          a[static_cast<size_t>(k)][static_cast<size_t>(qq)] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[static_cast<size_t>(p)][static_cast<size_t>(k)];
          double aqk = a[static_cast<size_t>(qq)][static_cast<size_t>(k)];
          a[static_cast<size_t>(p)][static_cast<size_t>(k)] = c * apk - s * aqk;
          a[static_cast<size_t>(qq)][static_cast<size_t>(k)] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double qkp = q[static_cast<size_t>(k)][static_cast<size_t>(p)];
          double qkq = q[static_cast<size_t>(k)][static_cast<size_t>(qq)];
          q[static_cast<size_t>(k)][static_cast<size_t>(p)] = c * qkp - s * qkq;
          q[static_cast<size_t>(k)][static_cast<size_t>(qq)] = s * qkp + c * qkq;
        }
      }
  }
  // Sort ascending, carry eigenvectors (columns of q).
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    return a[static_cast<size_t>(i)][static_cast<size_t>(i)] < a[static_cast<size_t>(j)][static_cast<size_t>(j)];
  });
  SpectralDecomposition out;
  out.values.resize(static_cast<size_t>(n));
  out.vectors.resize(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
  for (int k = 0; k < n; ++k) {
    int i = idx[static_cast<size_t>(k)];
    out.values[static_cast<size_t>(k)] = a[static_cast<size_t>(i)][static_cast<size_t>(i)];
    for (int r = 0; r < n; ++r) out.vectors[static_cast<size_t>(k)][static_cast<size_t>(r)] = q[static_cast<size_t>(r)][static_cast<size_t>(i)];
  }
  return out;
}

// f applied to the spectrum: Q f(Lambda) Q^T.
template <class F>
SymMatrix spectral_map(const SymMatrix& m, F&& f) {
  SpectralDecomposition d = eig_sym(m);
  const int n = m.n();
  SymMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += f(d.values[static_cast<size_t>(k)]) * d.vectors[static_cast<size_t>(k)][static_cast<size_t>(i)] * d.vectors[static_cast<size_t>(k)][static_cast<size_t>(j)];
      r.set(i, j, s);
    }
  return r;
}

// Inverse square root of an SPD matrix; S with S*A*S = I. Rejects matrices
// whose smallest eigenvalue is below 1e-12 * largest.
inline SymMatrix spd_inv_sqrt(const SymMatrix& a) {
  SpectralDecomposition d = eig_sym(a);
  double lo = d.values.front(), hi = d.values.back();
  if (lo <= 1e-12 * std::max(hi, 0.0) || lo <= 0.0) throw NotSPD("spd_inv_sqrt: matrix is not positive definite");
  return spectral_map(a, [](double v) { return 1.0 / std::sqrt(v); });
}

inline SymMatrix spd_sqrt(const SymMatrix& a) {
  SpectralDecomposition d = eig_sym(a);
  double lo = d.values.front(), hi = d.values.back();
  if (lo <= 1e-12 * std::max(hi, 0.0) || lo <= 0.0) throw NotSPD("spd_sqrt: matrix is not positive definite");
  return spectral_map(a, [](double v) { return std::sqrt(v); });
}

}  // namespace homsol
