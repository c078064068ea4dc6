#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace homsol {

// Exact coefficient type for harmonic-basis construction. Laplacian kernels
// must vanish identically, not just to roundoff.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }
inline double to_double(double d) { return d; }

inline std::string coeff_to_string(const Rational& r) { return r.str(); }

}  // namespace homsol
