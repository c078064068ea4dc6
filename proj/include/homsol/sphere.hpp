#pragma once

#include <lapacke.h>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace homsol {

class ResolutionTooLow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridTooLargeForDense : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point set on S^{n-1} for n = 2, 3. The n = 3 grid staggers latitudes at
// theta_j = pi*(j+1/2)/nlat so no point sits on a pole.
struct SphereGrid {
  int n = 2;
  int m = 0;     // n = 2: points on the circle
  int nlat = 0;  // n = 3
  int nlon = 0;

  static SphereGrid circle(int m) { return SphereGrid{2, m, 0, 0}; }
  static SphereGrid latlon(int nlat, int nlon) { return SphereGrid{3, 0, nlat, nlon}; }

  size_t size() const { return n == 2 ? static_cast<size_t>(m) : static_cast<size_t>(nlat) * nlon; }

  double theta(int j) const { return std::numbers::pi * (j + 0.5) / nlat; }
  double phi_lon(int i) const { return 2.0 * std::numbers::pi * i / nlon; }
  double phi_circle(int i) const { return 2.0 * std::numbers::pi * i / m; }

  // Cartesian coordinates of grid point idx.
  std::vector<double> point(size_t idx) const {
    if (n == 2) {
      double p = phi_circle(static_cast<int>(idx));
      return {std::cos(p), std::sin(p)};
    }
    int j = static_cast<int>(idx) / nlon;
    int i = static_cast<int>(idx) % nlon;
    double t = theta(j), p = phi_lon(i);
    return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
  }

  // Quadrature weight of the cell around point idx (sums to surface area up
  // to the staggered-cap truncation).
  double weight(size_t idx) const {
    if (n == 2) return 2.0 * std::numbers::pi / m;
    int j = static_cast<int>(idx) / nlon;
    double dth = std::numbers::pi / nlat;
    double dph = 2.0 * std::numbers::pi / nlon;
    return std::sin(theta(j)) * dth * dph;
  }

  bool operator==(const SphereGrid& o) const = default;
};

// Finite-volume Laplace-Beltrami operator. Constants lie in the kernel and
// row sums vanish by construction; conjugation by sqrt cell weights is
// symmetric, so the spectrum is real and nonpositive.
//
// On S^2 the longitude direction is diagonalized exactly (discrete Fourier
// transform per latitude ring), and each longitudinal mode m gets its own
// latitude flux scheme. Low modes (m <= 8) are desingularized at the poles
// by the substitution v = u / sin^m(theta), which is smooth and even across
// the poles; the face conductances are then calibrated so the scheme is
// exact on the two lowest Legendre profiles of that mode (l = m and
// l = m+1). This keeps the scheme second-order accurate in sup norm up to
// the pole rings, where a naive pointwise flux closure is only first-order
// for odd m. The calibrated faces are positive and the cell masses are the
// quadrature weights themselves, so the operator stays exactly
// self-adjoint (w.r.t. the sin(theta) cell weights) and nonpositive.
class DiscreteLB {
 public:
  explicit DiscreteLB(SphereGrid grid) : grid_(grid) {
    if (grid.n == 2) {
      if (grid.m < 8) throw ResolutionTooLow("build_lb: need at least 8 circle points");
    } else if (grid.n == 3) {
      if (grid.nlat < 8 || grid.nlon < 8) throw ResolutionTooLow("build_lb: need at least 8 points per dimension");
      precompute_s2();
    } else {
      throw std::invalid_argument("build_lb: n must be 2 or 3");
    }
  }

  const SphereGrid& grid() const { return grid_; }

  std::vector<double> apply(const std::vector<double>& g) const {
    if (g.size() != grid_.size()) throw std::invalid_argument("DiscreteLB: grid mismatch");
    std::vector<double> out(g.size(), 0.0);
    if (grid_.n == 2) {
      int m = grid_.m;
      double h = 2.0 * std::numbers::pi / m;
      for (int i = 0; i < m; ++i) {
        int l = (i + m - 1) % m, r = (i + 1) % m;
        out[static_cast<size_t>(i)] = (g[static_cast<size_t>(l)] - 2.0 * g[static_cast<size_t>(i)] + g[static_cast<size_t>(r)]) / (h * h);
      }
      return out;
    }
    int nlat = grid_.nlat, nlon = grid_.nlon;
    int nm = nlon / 2;  // highest distinct longitudinal frequency
    // Forward DFT per latitude ring: G_m(j) = sum_i g(j,i) e^{-im phi_i}.
    // The ring mean is subtracted before transforming the m >= 1 modes so a
    // constant ring leaks exactly nothing into the high modes (whose pole
    // coefficients would amplify roundoff leakage).
    std::vector<double> gre(static_cast<size_t>(nlat) * (nm + 1)), gim(gre.size());
    for (int j = 0; j < nlat; ++j) {
      const double* row = g.data() + static_cast<size_t>(j) * nlon;
      double mean = 0.0;
      for (int i = 0; i < nlon; ++i) mean += row[i];
      mean /= nlon;
      gre[static_cast<size_t>(j) * (nm + 1)] = mean * nlon;
      gim[static_cast<size_t>(j) * (nm + 1)] = 0.0;
      for (int m = 1; m <= nm; ++m) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i < nlon; ++i) {
          size_t k = static_cast<size_t>(m) * i % nlon;
          re += (row[i] - mean) * cos_tab_[k];
          im -= (row[i] - mean) * sin_tab_[k];
        }
        gre[static_cast<size_t>(j) * (nm + 1) + m] = re;
        gim[static_cast<size_t>(j) * (nm + 1) + m] = im;
      }
    }
    // Apply the per-mode latitude operator to the real and imaginary parts.
    std::vector<double> hre(gre.size()), him(gre.size());
    std::vector<double> col(static_cast<size_t>(nlat)), lc(static_cast<size_t>(nlat));
    for (int m = 0; m <= nm; ++m) {
      for (const auto* src : {&gre, &gim}) {
        for (int j = 0; j < nlat; ++j) col[static_cast<size_t>(j)] = (*src)[static_cast<size_t>(j) * (nm + 1) + m];
        apply_mode(m, col, lc);
        auto* dst = (src == &gre) ? &hre : &him;
        for (int j = 0; j < nlat; ++j) (*dst)[static_cast<size_t>(j) * (nm + 1) + m] = lc[static_cast<size_t>(j)];
      }
    }
    // Inverse transform; mode 0 (and Nyquist for even nlon) counted once.
    for (int j = 0; j < nlat; ++j) {
      double* row = out.data() + static_cast<size_t>(j) * nlon;
      for (int m = 0; m <= nm; ++m) {
        double c = (m == 0 || (2 * m == nlon)) ? 1.0 : 2.0;
        double re = hre[static_cast<size_t>(j) * (nm + 1) + m];
        double im = him[static_cast<size_t>(j) * (nm + 1) + m];
        for (int i = 0; i < nlon; ++i) {
          size_t k = static_cast<size_t>(m) * i % nlon;
          row[i] += c * (re * cos_tab_[k] - im * sin_tab_[k]);
        }
      }
      for (int i = 0; i < nlon; ++i) row[i] /= nlon;
    }
    return out;
  }

  // Dense symmetrized operator W^{1/2} L W^{-1/2}, column-major.
  std::vector<double> dense_symmetrized() const {
    size_t n = grid_.size();
    std::vector<double> cols(n, 0.0), mat(n * n);
    std::vector<double> sqw(n);
    for (size_t i = 0; i < n; ++i) sqw[i] = std::sqrt(grid_.weight(i));
    for (size_t c = 0; c < n; ++c) {
      cols.assign(n, 0.0);
      cols[c] = 1.0;
      std::vector<double> lc = apply(cols);
      for (size_t r = 0; r < n; ++r) mat[c * n + r] = sqw[r] * lc[r] / sqw[c];
    }
    return mat;
  }

 private:
  static constexpr int kModeCap = 8;  // highest pole-desingularized mode

  void precompute_s2() {
    int nlat = grid_.nlat, nlon = grid_.nlon;
    int nm = nlon / 2;
    double h = std::numbers::pi / nlat;
    // One shared twiddle table; mode m uses index m*i mod nlon, which keeps
    // the DFT arguments exactly reduced to one period.
    cos_tab_.resize(static_cast<size_t>(nlon));
    sin_tab_.resize(cos_tab_.size());
    for (int i = 0; i < nlon; ++i) {
      double a = 2.0 * std::numbers::pi * i / nlon;
      cos_tab_[static_cast<size_t>(i)] = std::cos(a);
      sin_tab_[static_cast<size_t>(i)] = std::sin(a);
    }
    int mcap = std::min(kModeCap, nm);
    mass_.assign(static_cast<size_t>(mcap + 1) * nlat, 0.0);
    face_.assign(static_cast<size_t>(mcap + 1) * (nlat + 1), 0.0);
    std::vector<double> c(static_cast<size_t>(nlat));
    for (int j = 0; j < nlat; ++j) c[static_cast<size_t>(j)] = std::cos(grid_.theta(j));
    for (int m = 0; m <= mcap; ++m) {
      double* mass = mass_.data() + static_cast<size_t>(m) * nlat;
      double* face = face_.data() + static_cast<size_t>(m) * (nlat + 1);
      for (int j = 0; j < nlat; ++j) mass[j] = std::pow(std::sin(grid_.theta(j)), 2 * m + 1);
      // Zero-flux pole closure; interior faces calibrated so that mode m is
      // exact on v = cos(theta), i.e. on the l = m+1 spherical harmonic.
      // The defining recurrence telescopes to a cumulative sum; mirroring
      // across the equator avoids cancellation near the far pole.
      int half = nlat / 2;
      double csum = 0.0;
      for (int j = 0; j < half; ++j) {
        csum += mass[j] * c[static_cast<size_t>(j)];
        face[j + 1] = 2.0 * (m + 1) * h * h * csum / (c[static_cast<size_t>(j)] - c[static_cast<size_t>(j) + 1]);
      }
      for (int j = 1; j <= half; ++j) face[nlat - j] = face[j];
    }
  }

  // Latitude operator for longitudinal mode m, applied to one ring column.
  void apply_mode(int m, const std::vector<double>& u, std::vector<double>& out) const {
    int nlat = grid_.nlat;
    double h = std::numbers::pi / nlat;
    int mcap = std::min(kModeCap, grid_.nlon / 2);
    if (m <= mcap) {
      const double* mass = mass_.data() + static_cast<size_t>(m) * nlat;
      const double* face = face_.data() + static_cast<size_t>(m) * (nlat + 1);
      std::vector<double> v(static_cast<size_t>(nlat));
      for (int j = 0; j < nlat; ++j) v[static_cast<size_t>(j)] = u[static_cast<size_t>(j)] / std::pow(std::sin(grid_.theta(j)), m);
      for (int j = 0; j < nlat; ++j) {
        double flux = 0.0;
        if (j + 1 < nlat) flux += face[j + 1] * (v[static_cast<size_t>(j) + 1] - v[static_cast<size_t>(j)]);
        if (j > 0) flux -= face[j] * (v[static_cast<size_t>(j)] - v[static_cast<size_t>(j) - 1]);
        double bv = flux / (mass[j] * h * h) - m * (m + 1.0) * v[static_cast<size_t>(j)];
        out[static_cast<size_t>(j)] = bv * std::pow(std::sin(grid_.theta(j)), m);
      }
      return;
    }
    // High modes: plain flux form with the exact m^2 longitudinal symbol.
    for (int j = 0; j < nlat; ++j) {
      double st = std::sin(grid_.theta(j));
      double s_up = j + 1 < nlat ? std::sin(std::numbers::pi * (j + 1.0) / nlat) : 0.0;
      double s_dn = j > 0 ? std::sin(std::numbers::pi * static_cast<double>(j) / nlat) : 0.0;
      double flux = 0.0;
      if (j + 1 < nlat) flux += s_up * (u[static_cast<size_t>(j) + 1] - u[static_cast<size_t>(j)]);
      if (j > 0) flux -= s_dn * (u[static_cast<size_t>(j)] - u[static_cast<size_t>(j) - 1]);
      out[static_cast<size_t>(j)] = flux / (st * h * h) - static_cast<double>(m) * m * u[static_cast<size_t>(j)] / (st * st);
    }
  }

  SphereGrid grid_;
  std::vector<double> cos_tab_, sin_tab_;  // shared length-nlon twiddle table
  std::vector<double> mass_, face_;        // per-mode cell masses and faces
};

inline DiscreteLB build_lb(const SphereGrid& grid) { return DiscreteLB(grid); }

// k smallest magnitudes of the spectrum of -L, ascending. Dense symmetric
// eigensolve; grids above 5000 points are rejected.
inline std::vector<double> lowest_eigenvalues(const DiscreteLB& lb, int k) {
  size_t n = lb.grid().size();
  if (n > 5000) throw GridTooLargeForDense("lowest_eigenvalues: grid above the 5000-point dense cap");
  if (k < 0 || static_cast<size_t>(k) > n) throw std::invalid_argument("lowest_eigenvalues: k out of range");
  std::vector<double> mat = lb.dense_symmetrized();
  // Exact symmetrization guards against roundoff asymmetry before dsyev.
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (mat[i * n + j] + mat[j * n + i]);
      mat[i * n + j] = v;
      mat[j * n + i] = v;
    }
  std::vector<double> w(n);
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n), mat.data(), static_cast<lapack_int>(n), w.data());
  if (info != 0) throw std::runtime_error("lowest_eigenvalues: dsyev failed");
  // Spectrum of -L, ascending from the top of L's (nonpositive) spectrum.
  std::vector<double> out(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<size_t>(i)] = -w[n - 1 - static_cast<size_t>(i)];
  return out;
}

// ||L g + d(d+n-2) g||_inf / ||g||_inf for a profile sampled on the grid.
inline double profile_eigencheck(const DiscreteLB& lb, const std::vector<double>& g, double d) {
  if (g.size() != lb.grid().size()) throw std::invalid_argument("profile_eigencheck: grid mismatch");
  double lambda = d * (d + lb.grid().n - 2);
  std::vector<double> lg = lb.apply(g);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    num = std::max(num, std::abs(lg[i] + lambda * g[i]));
    den = std::max(den, std::abs(g[i]));
  }
  if (den == 0.0) return 0.0;
  return num / den;
}

}  // namespace homsol
