#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace dgx {

// Exact arithmetic throughout. cpp_rational keeps values reduced with a
// positive denominator after every operation.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string to_string(const Rational& q) { return q.str(); }

/// Parses "p", "-p" or "p/q". Throws StructuralError on malformed input.
inline Rational rational_from_string(const std::string& s) {
  try {
    return Rational(s);
  } catch (const std::exception&) {
    throw StructuralError("malformed rational literal: '" + s + "'");
  }
}

inline int sign_pow(long long exponent) { return (exponent % 2 == 0) ? 1 : -1; }

}  // namespace dgx
