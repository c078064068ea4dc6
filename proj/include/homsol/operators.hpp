#pragma once

#include "homsol/symmatrix.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <limits>
#include <string>
#include <vector>

namespace homsol {

class OperatorParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OpKind { Linear, SpecialLagrangian, PerturbedLinear };

// F: SymMatrix -> real. Three built-in kinds:
//   Linear(A):            F(M) = tr(A M), A symmetric positive definite
//   SpecialLagrangian(c): F(M) = sum_i arctan(lambda_i(M)) - c
//   PerturbedLinear(eps): F(M) = tr(M) + eps sin(M_11), |eps| < 1/2
struct EllipticOperator {
  OpKind kind = OpKind::Linear;
  int n = 2;
  SymMatrix A{2};  // Linear only
  double c = 0.0;  // SpecialLagrangian only
  double eps = 0.0;  // PerturbedLinear only

  static EllipticOperator linear(const SymMatrix& A) {
    auto dec = eig_sym(A);
    if (dec.values.front() <= 0.0) throw std::invalid_argument("EllipticOperator: Linear requires A positive definite");
    EllipticOperator F;
    F.kind = OpKind::Linear;
    F.n = A.n();
    F.A = A;
    return F;
  }
  static EllipticOperator special_lagrangian(int n, double c) {
    EllipticOperator F;
    F.kind = OpKind::SpecialLagrangian;
    F.n = n;
    F.A = SymMatrix(n);
    F.c = c;
    return F;
  }
  static EllipticOperator perturbed_linear(int n, double eps) {
    if (std::abs(eps) >= 0.5) throw std::invalid_argument("EllipticOperator: PerturbedLinear requires |eps| < 1/2");
    EllipticOperator F;
    F.kind = OpKind::PerturbedLinear;
    F.n = n;
    F.A = SymMatrix(n);
    F.eps = eps;
    return F;
  }
};

inline double op_eval(const EllipticOperator& F, const SymMatrix& M) {
  if (M.n() != F.n) throw std::invalid_argument("op_eval: dimension mismatch");
  switch (F.kind) {
    case OpKind::Linear:
      return F.A.dot(M);
    case OpKind::SpecialLagrangian: {
      auto dec = eig_sym(M);
      double s = 0.0;
      for (double l : dec.values) s += std::atan(l);
      return s - F.c;
    }
    case OpKind::PerturbedLinear:
      return M.trace() + F.eps * std::sin(M(0, 0));
  }
  throw std::logic_error("op_eval: unknown kind");
}

// Analytic gradient G with the convention dF = sum_{i,j} G_ij dM_ij over all
// ordered index pairs.
inline SymMatrix op_grad(const EllipticOperator& F, const SymMatrix& M) {
  if (M.n() != F.n) throw std::invalid_argument("op_grad: dimension mismatch");
  switch (F.kind) {
    case OpKind::Linear:
      return F.A;
    case OpKind::SpecialLagrangian:
      return spectral_map(M, [](double l) { return 1.0 / (1.0 + l * l); });
    case OpKind::PerturbedLinear: {
      SymMatrix G = SymMatrix::identity(F.n);
      G.set(0, 0, 1.0 + F.eps * std::cos(M(0, 0)));
      return G;
    }
  }
  throw std::logic_error("op_grad: unknown kind");
}

// Finite-difference gradient over the n(n+1)/2 symmetric coordinates
// (off-diagonal perturbations applied to both (i,j) and (j,i)); central
// differences with step 1e-4. Cross-check for op_grad.
inline SymMatrix op_grad_fd(const EllipticOperator& F, const SymMatrix& M, double h = 1e-4) {
  if (M.n() != F.n) throw std::invalid_argument("op_grad_fd: dimension mismatch");
  int n = F.n;
  SymMatrix G(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      SymMatrix Mp = M, Mm = M;
      Mp.set(i, j, M(i, j) + h);
      Mm.set(i, j, M(i, j) - h);
      double df = (op_eval(F, Mp) - op_eval(F, Mm)) / (2.0 * h);
      // set() writes both triangles, so an off-diagonal step perturbs two
      // ordered coordinates; the per-pair derivative is df/2.
      G.set(i, j, i == j ? df : 0.5 * df);
    }
  return G;
}

struct EllipticityRange {
  double mu_min = 0.0;
  double mu_max = 0.0;
};

inline EllipticityRange ellipticity_range(const EllipticOperator& F, const std::vector<SymMatrix>& samples) {
  if (samples.empty()) throw std::invalid_argument("ellipticity_range: empty sample set");
  EllipticityRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& M : samples) {
    auto dec = eig_sym(op_grad(F, M));
    r.mu_min = std::min(r.mu_min, dec.values.front());
    r.mu_max = std::max(r.mu_max, dec.values.back());
  }
  return r;
}

inline double check_f_at_zero(const EllipticOperator& F) { return op_eval(F, SymMatrix(F.n)); }

// --- CLI spec strings: linear:A=[[...],[...]], speclag:c=<f>, perturbed:eps=<f>

namespace detail {

inline std::vector<std::vector<double>> parse_matrix_literal(const std::string& s) {
  size_t pos = 0;
  auto skip_ws = [&] { while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos; };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c) throw OperatorParseError(std::string("operator spec: expected '") + c + "' in matrix literal");
    ++pos;
  };
  std::vector<std::vector<double>> rows;
  expect('[');
  while (true) {
    expect('[');
    std::vector<double> row;
    while (true) {
      skip_ws();
      size_t used = 0;
      double v;
      try {
        v = std::stod(s.substr(pos), &used);
      } catch (const std::exception&) {
        throw OperatorParseError("operator spec: bad number in matrix literal");
      }
      pos += used;
      row.push_back(v);
      skip_ws();
      if (pos < s.size() && s[pos] == ',') {
        ++pos;
        continue;
      }
      break;
    }
    expect(']');
    rows.push_back(std::move(row));
    skip_ws();
    if (pos < s.size() && s[pos] == ',') {
      ++pos;
      continue;
    }
    break;
  }
  expect(']');
  skip_ws();
  if (pos != s.size()) throw OperatorParseError("operator spec: trailing characters after matrix literal");
  return rows;
}

inline double parse_scalar(const std::string& s, const std::string& what) {
  size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw OperatorParseError("operator spec: bad " + what + " value");
  }
  if (used != s.size()) throw OperatorParseError("operator spec: trailing characters after " + what);
  return v;
}

}  // namespace detail

// Parse an operator spec string. `n` fixes the dimension for the scalar
// kinds; a Linear matrix must match it when n > 0.
inline EllipticOperator parse_operator(const std::string& spec, int n) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw OperatorParseError("operator spec: expected '<kind>:<params>'");
  std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  if (kind == "linear") {
    if (rest.rfind("A=", 0) != 0) throw OperatorParseError("operator spec: linear expects A=[[...]]");
    auto rows = detail::parse_matrix_literal(rest.substr(2));
    int m = static_cast<int>(rows.size());
    SymMatrix A(m);
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != m) throw OperatorParseError("operator spec: A must be square");
      for (int j = 0; j < m; ++j) A.set(i, j, rows[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (std::abs(rows[static_cast<size_t>(i)][static_cast<size_t>(j)] - rows[static_cast<size_t>(j)][static_cast<size_t>(i)]) > 1e-12)
          throw OperatorParseError("operator spec: A must be symmetric");
    if (n > 0 && m != n) throw OperatorParseError("operator spec: A dimension does not match n");
    return EllipticOperator::linear(A);
  }
  if (kind == "speclag") {
    if (rest.rfind("c=", 0) != 0) throw OperatorParseError("operator spec: speclag expects c=<float>");
    return EllipticOperator::special_lagrangian(n, detail::parse_scalar(rest.substr(2), "c"));
  }
  if (kind == "perturbed") {
    if (rest.rfind("eps=", 0) != 0) throw OperatorParseError("operator spec: perturbed expects eps=<float>");
    return EllipticOperator::perturbed_linear(n, detail::parse_scalar(rest.substr(4), "eps"));
  }
  throw OperatorParseError("operator spec: unknown kind '" + kind + "'");
}

inline std::string print_operator(const EllipticOperator& F) {
  char buf[64];
  switch (F.kind) {
    case OpKind::Linear: {
      std::string s = "linear:A=[";
      for (int i = 0; i < F.n; ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < F.n; ++j) {
          std::snprintf(buf, sizeof buf, "%s%.17g", j ? "," : "", F.A(i, j));
          s += buf;
        }
        s += "]";
      }
      return s + "]";
    }
    case OpKind::SpecialLagrangian:
      std::snprintf(buf, sizeof buf, "speclag:c=%.17g", F.c);
      return buf;
    case OpKind::PerturbedLinear:
      std::snprintf(buf, sizeof buf, "perturbed:eps=%.17g", F.eps);
      return buf;
  }
  throw std::logic_error("print_operator: unknown kind");
}

}  // namespace homsol
