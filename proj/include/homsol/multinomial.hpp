#pragma once

#include "homsol/rational.hpp"
#include "homsol/symmatrix.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace homsol {

using Expo = std::vector<int>;

inline int expo_degree(const Expo& e) { return std::accumulate(e.begin(), e.end(), 0); }

// Graded lexicographic, leading terms first: higher total degree wins, ties
// broken lexicographically on exponents.
struct GrlexDesc {
  bool operator()(const Expo& a, const Expo& b) const {
    int da = expo_degree(a), db = expo_degree(b);
    if (da != db) return da > db;
    return a > b;
  }
};

class PolyParseError : public std::runtime_error {
 public:
  PolyParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  size_t pos() const { return pos_; }

 private:
  size_t pos_;
};

namespace detail {
inline bool coeff_is_zero(const Rational& c) { return c == 0; }
inline bool coeff_is_zero(double c) { return c == 0.0; }
}  // namespace detail

// Sparse multivariate polynomial, exponent vector -> coefficient. C is
// Rational for exact work (harmonic bases) or double elsewhere.
template <class C>
class Multinomial {
 public:
  using Coeff = C;
  using TermMap = std::map<Expo, C, GrlexDesc>;

  explicit Multinomial(int nvars = 0) : nvars_(nvars) {
    if (nvars < 0) throw std::invalid_argument("Multinomial: negative nvars");
  }

  static Multinomial monomial(int nvars, const Expo& e, const C& c) {
    Multinomial p(nvars);
    p.add_term(e, c);
    return p;
  }

  static Multinomial constant(int nvars, const C& c) { return monomial(nvars, Expo(static_cast<size_t>(nvars), 0), c); }

  static Multinomial variable(int nvars, int i) {
    Expo e(static_cast<size_t>(nvars), 0);
    e[static_cast<size_t>(i)] = 1;
    return monomial(nvars, e, C(1));
  }

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  void add_term(const Expo& e, const C& c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("Multinomial: exponent length mismatch");
    if (detail::coeff_is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (detail::coeff_is_zero(it->second)) terms_.erase(it);
    }
  }

  C coeff(const Expo& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? C(0) : it->second;
  }

  Multinomial operator+(const Multinomial& o) const {
    check_vars(o);
    Multinomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  Multinomial operator-(const Multinomial& o) const {
    check_vars(o);
    Multinomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, C(0) - c);
    return r;
  }

  Multinomial operator*(const C& s) const {
    Multinomial r(nvars_);
    if (detail::coeff_is_zero(s)) return r;
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
  }

  Multinomial operator*(const Multinomial& o) const {
    check_vars(o);
    Multinomial r(nvars_);
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) {
        Expo e(static_cast<size_t>(nvars_));
        for (int i = 0; i < nvars_; ++i) e[static_cast<size_t>(i)] = ea[static_cast<size_t>(i)] + eb[static_cast<size_t>(i)];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  bool operator==(const Multinomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  // Total degree of the leading term; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : expo_degree(terms_.begin()->first); }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    int d = degree();
    for (const auto& [e, c] : terms_)
      if (expo_degree(e) != d) return false;
    return true;
  }

  double eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("poly_eval: dimension mismatch");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = to_double(c);
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[static_cast<size_t>(i)]; ++k) t *= x[static_cast<size_t>(i)];
      sum += t;
    }
    return sum;
  }

  Multinomial derivative(int var) const {
    Multinomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      int k = e[static_cast<size_t>(var)];
      if (k == 0) continue;
      Expo e2 = e;
      e2[static_cast<size_t>(var)] = k - 1;
      r.add_term(e2, c * C(k));
    }
    return r;
  }

  Multinomial laplacian() const {
    Multinomial r(nvars_);
    for (int i = 0; i < nvars_; ++i) r = r + derivative(i).derivative(i);
    return r;
  }

  SymMatrix hessian_at(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("poly_hessian_at: dimension mismatch");
    SymMatrix h(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      Multinomial di = derivative(i);
      for (int j = i; j < nvars_; ++j) h.set(i, j, di.derivative(j).eval(x));
    }
    return h;
  }

  // p(Bx): substitutes x_i -> sum_j B[i][j] x_j and expands.
  template <class T>
  Multinomial<T> compose_linear(const std::vector<std::vector<T>>& b) const {
    if (static_cast<int>(b.size()) != nvars_) throw std::invalid_argument("poly_compose_linear: shape mismatch");
    for (const auto& row : b)
      if (static_cast<int>(row.size()) != nvars_) throw std::invalid_argument("poly_compose_linear: shape mismatch");
    std::vector<Multinomial<T>> forms;
    forms.reserve(static_cast<size_t>(nvars_));
    for (int i = 0; i < nvars_; ++i) {
      Multinomial<T> li(nvars_);
      for (int j = 0; j < nvars_; ++j) {
        Expo e(static_cast<size_t>(nvars_), 0);
        e[static_cast<size_t>(j)] = 1;
        li.add_term(e, b[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      }
      forms.push_back(li);
    }
    Multinomial<T> r(nvars_);
    for (const auto& [e, c] : terms_) {
      Multinomial<T> t = Multinomial<T>::constant(nvars_, convert_coeff<T>(c));
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[static_cast<size_t>(i)]; ++k) t = t * forms[static_cast<size_t>(i)];
      r = r + t;
    }
    return r;
  }

  Multinomial<double> to_double_poly() const {
    Multinomial<double> r(nvars_);
    for (const auto& [e, c] : terms_) r.add_term(e, to_double(c));
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      std::string cs = format_coeff(c);
      bool neg = !cs.empty() && cs[0] == '-';
      if (neg) cs = cs.substr(1);
      os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
      first = false;
      bool has_vars = expo_degree(e) > 0;
      if (cs != "1" || !has_vars) {
        os << cs;
        if (has_vars) os << "*";
      }
      bool firstv = true;
      for (int i = 0; i < nvars_; ++i) {
        int k = e[static_cast<size_t>(i)];
        if (k == 0) continue;
        if (!firstv) os << "*";
        firstv = false;
        os << "x" << (i + 1);
        if (k > 1) os << "^" << k;
      }
    }
    return os.str();
  }

  static Multinomial parse(const std::string& s, int nvars);

 private:
  void check_vars(const Multinomial& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Multinomial: nvars mismatch");
  }

  template <class T>
  static T convert_coeff(const C& c) {
    if constexpr (std::is_same_v<T, C>)
      return c;
    else
      return T(to_double(c));
  }

  static std::string format_coeff(const Rational& c) { return c.str(); }
  static std::string format_coeff(double c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    return buf;
  }

  int nvars_;
  TermMap terms_;
};

namespace detail {

struct Cursor {
  const std::string& s;
  size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
};

inline long parse_uint(Cursor& c, const char* what) {
  c.skip_ws();
  size_t start = c.i;
  while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.i;
  if (c.i == start) throw PolyParseError(std::string("expected ") + what, start);
  return std::stol(c.s.substr(start, c.i - start));
}

inline Rational number_from_string(const std::string& t, const Rational*) {
  // Integers, a/b fractions, and decimals (converted exactly).
  auto slash = t.find('/');
  if (slash != std::string::npos)
    return Rational(BigInt(t.substr(0, slash)), BigInt(t.substr(slash + 1)));
  auto dot = t.find('.');
  if (dot == std::string::npos) return Rational(BigInt(t));
  std::string digits = t.substr(0, dot) + t.substr(dot + 1);
  BigInt den = 1;
  for (size_t k = dot + 1; k < t.size(); ++k) den *= 10;
  return Rational(BigInt(digits), den);
}

inline double number_from_string(const std::string& t, const double*) {
  auto slash = t.find('/');
  if (slash != std::string::npos) return std::stod(t.substr(0, slash)) / std::stod(t.substr(slash + 1));
  return std::stod(t);
}

template <class C>
inline C parse_number(Cursor& c) {
  c.skip_ws();
  size_t start = c.i;
  auto is_num = [&](char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '/' || ch == 'e' || ch == 'E';
  };
  while (!c.done()) {
    char ch = c.peek();
    if ((ch == '+' || ch == '-') && c.i > start && (c.s[c.i - 1] == 'e' || c.s[c.i - 1] == 'E')) {
      ++c.i;
      continue;
    }
    if (!is_num(ch)) break;
    ++c.i;
  }
  if (c.i == start) throw PolyParseError("expected number", start);
  try {
    return number_from_string(c.s.substr(start, c.i - start), static_cast<const C*>(nullptr));
  } catch (const std::exception&) {
    throw PolyParseError("malformed number", start);
  }
}

}  // namespace detail

template <class C>
Multinomial<C> Multinomial<C>::parse(const std::string& s, int nvars) {
  detail::Cursor c{s};
  Multinomial<C> p(nvars);
  c.skip_ws();
  if (c.done()) throw PolyParseError("empty polynomial", 0);
  bool first = true;
  while (true) {
    c.skip_ws();
    if (c.done()) {
      if (first) throw PolyParseError("expected term", c.i);
      break;
    }
    C sign(1);
    if (c.peek() == '+' || c.peek() == '-') {
      if (c.peek() == '-') sign = C(-1);
      ++c.i;
      c.skip_ws();
    } else if (!first) {
      throw PolyParseError("expected '+' or '-'", c.i);
    }
    first = false;
    C coeff = sign;
    bool saw_coeff = false;
    bool expect_var = false;
    if (!c.done() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.')) {
      coeff = sign * detail::parse_number<C>(c);
      saw_coeff = true;
      c.skip_ws();
      if (!c.done() && c.peek() == '*') {
        ++c.i;
        c.skip_ws();
        expect_var = true;
      }
    }
    Expo e(static_cast<size_t>(nvars), 0);
    bool saw_var = false;
    while (!c.done() && c.peek() == 'x') {
      ++c.i;
      long idx = detail::parse_uint(c, "variable index");
      if (idx < 1 || idx > nvars) throw PolyParseError("variable index out of range", c.i);
      long k = 1;
      c.skip_ws();
      if (!c.done() && c.peek() == '^') {
        ++c.i;
        k = detail::parse_uint(c, "exponent");
      }
      e[static_cast<size_t>(idx - 1)] += static_cast<int>(k);
      saw_var = true;
      c.skip_ws();
      if (!c.done() && c.peek() == '*') {
        ++c.i;
        c.skip_ws();
      }
    }
    if ((!saw_coeff && !saw_var) || (expect_var && !saw_var)) throw PolyParseError("expected term", c.i);
    p.add_term(e, coeff);
    c.skip_ws();
  }
  return p;
}

// Spec-facing names.
template <class C>
double poly_eval(const Multinomial<C>& p, const std::vector<double>& x) {
  return p.eval(x);
}

template <class C>
Multinomial<C> poly_laplacian(const Multinomial<C>& p) {
  return p.laplacian();
}

template <class C>
SymMatrix poly_hessian_at(const Multinomial<C>& p, const std::vector<double>& x) {
  return p.hessian_at(x);
}

template <class C, class T>
Multinomial<T> poly_compose_linear(const Multinomial<C>& p, const std::vector<std::vector<T>>& b) {
  return p.template compose_linear<T>(b);
}

using RationalPoly = Multinomial<Rational>;
using DoublePoly = Multinomial<double>;

inline std::vector<std::vector<double>> to_rows(const SymMatrix& m) {
  std::vector<std::vector<double>> rows(static_cast<size_t>(m.n()), std::vector<double>(static_cast<size_t>(m.n())));
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
  return rows;
}

}  // namespace homsol
