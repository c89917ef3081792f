#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

// Under C++20 rewritten comparisons, boost's mixed rational/integer equality
// templates call each other forever. Exact-match overloads win resolution.
namespace boost {
#define TWTSP_RATIONAL_EQ(T)                                                                                  \
  inline bool operator==(const rational<std::int64_t>& a, T b) { return a.denominator() == 1 && a.numerator() == b; } \
  inline bool operator==(T b, const rational<std::int64_t>& a) { return a == b; }                            \
  inline bool operator!=(const rational<std::int64_t>& a, T b) { return !(a == b); }                          \
  inline bool operator!=(T b, const rational<std::int64_t>& a) { return !(a == b); }
TWTSP_RATIONAL_EQ(int)
TWTSP_RATIONAL_EQ(long)
TWTSP_RATIONAL_EQ(long long)
#undef TWTSP_RATIONAL_EQ
}  // namespace boost

namespace twtsp {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline double to_double(const Rational& q) {
  return boost::rational_cast<double>(q);
}

}  // namespace twtsp
