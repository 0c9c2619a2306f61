#pragma once

// Scalar layer shared by the whole library.
//
// Discrete models are templated over a scalar type R which is either `double`
// or `Rat` (an arbitrary-precision rational).  Rational mode keeps every vote,
// risk and posterior exact; double mode is used when model input does not
// normalize exactly.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

namespace expertvote {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

template <class R>
inline constexpr bool is_exact_scalar_v = !std::is_floating_point_v<R>;

inline double to_double(double x) { return x; }
inline double to_double(const Rat& x) { return x.template convert_to<double>(); }

// Extended nonnegative value: a finite scalar or +infinity.  Used for
// likelihood-ratio statistics and normalized ratio blocks.
template <class R>
struct ExtReal {
  bool inf = false;
  R v{};

  static ExtReal infinity() { return ExtReal{true, R{}}; }
  static ExtReal finite(R x) { return ExtReal{false, std::move(x)}; }
  bool is_zero() const { return !inf && v == 0; }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.v == b.v;
  }
  friend bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.v < b.v;
  }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return a < b || a == b; }
};

// --- parsing ---------------------------------------------------------------

namespace detail {

inline std::optional<BigInt> parse_big_digits(std::string_view s) {
  if (s.empty()) return std::nullopt;
  BigInt n = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    n = n * 10 + (c - '0');
  }
  return n;
}

inline BigInt pow10(unsigned k) {
  BigInt p = 1;
  for (unsigned i = 0; i < k; ++i) p *= 10;
  return p;
}

}  // namespace detail

// Parses an exact rational from "3", "-4/7", "0.25", "2.5e-3" and the like.
// Returns nullopt on anything else (including non-finite decimals like "1/0").
inline std::optional<Rat> parse_rational(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;

  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = detail::parse_big_digits(s.substr(0, slash));
    auto den = detail::parse_big_digits(s.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    Rat r(*num, *den);
    return neg ? Rat(-r) : r;
  }

  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view es = s.substr(e + 1);
    s = s.substr(0, e);
    bool eneg = false;
    if (!es.empty() && (es.front() == '+' || es.front() == '-')) {
      eneg = es.front() == '-';
      es.remove_prefix(1);
    }
    if (es.empty() || es.size() > 6) return std::nullopt;
    for (char c : es) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      exp10 = exp10 * 10 + (c - '0');
    }
    if (eneg) exp10 = -exp10;
  }

  std::string_view ipart = s, fpart;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    ipart = s.substr(0, dot);
    fpart = s.substr(dot + 1);
  }
  if (ipart.empty() && fpart.empty()) return std::nullopt;
  BigInt mant = 0;
  for (std::string_view part : {ipart, fpart})
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      mant = mant * 10 + (c - '0');
    }

  long shift = exp10 - static_cast<long>(fpart.size());
  Rat r;
  if (shift >= 0)
    r = Rat(mant * detail::pow10(static_cast<unsigned>(shift)));
  else
    r = Rat(mant, detail::pow10(static_cast<unsigned>(-shift)));
  return neg ? Rat(-r) : r;
}

// --- printing --------------------------------------------------------------

inline std::string fraction_string(const Rat& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

inline std::string decimal_string(const Rat& x, unsigned digits = 17) {
  using F50 = boost::multiprecision::cpp_bin_float_50;
  return F50(x).str(digits);
}

inline std::string decimal_string(double x, unsigned digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", static_cast<int>(digits), x);
  return buf;
}

template <class R>
std::string scalar_string(const R& x) {
  if constexpr (is_exact_scalar_v<R>)
    return fraction_string(x);
  else
    return decimal_string(x);
}

}  // namespace expertvote
