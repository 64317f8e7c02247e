#pragma once

// Exact arithmetic used throughout the kernel pipeline.  All thresholds,
// scale factors and guarantee checks are computed over arbitrary-precision
// rationals so that no tolerance ever hides a real violation.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kwsat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Clause mass, multiplicities aggregates, solution sizes.
using Count = std::uint64_t;

// Thrown when an enumeration, generation or freeness check would exceed the
// caller-supplied work budget.
struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Default ceiling on enumeration work (solution subsets, right-side subsets
// of a freeness check).  Callers pass something larger when they mean it.
inline constexpr Count default_enum_budget = 20'000'000;

// Thrown on malformed input text (formula files, rationals, traces).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when pipeline parameters are out of their admissible domain.
struct param_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline BigInt num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt den(const Rational& r) { return boost::multiprecision::denominator(r); }

// Canonical text form "p/q" with q >= 1, used in JSON reports and traces.
inline std::string format_rational(const Rational& r) {
  return num(r).str() + "/" + den(r).str();
}

// Accepts "p/q", a plain integer, or a decimal literal such as "0.125".
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw parse_error("bad rational: '" + std::string(text) + "'"); };
  std::string s(text);
  if (s.empty()) fail();
  // strip surrounding whitespace
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  if (first == std::string::npos) fail();
  s = s.substr(first, last - first + 1);

  auto is_int = [](std::string_view v) {
    if (!v.empty() && (v[0] == '+' || v[0] == '-')) v.remove_prefix(1);
    if (v.empty()) return false;
    for (char c : v)
      if (c < '0' || c > '9') return false;
    return true;
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    const std::string p = s.substr(0, slash), q = s.substr(slash + 1);
    // the sign belongs to the numerator only
    if (!is_int(p) || !is_int(q) || q[0] == '+' || q[0] == '-') fail();
    const BigInt qq(q);
    if (qq == 0) fail();
    return Rational(BigInt(p), qq);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool negative = false;
    if (!ip.empty() && (ip[0] == '+' || ip[0] == '-')) {
      negative = ip[0] == '-';
      ip.erase(0, 1);
    }
    if (ip.empty() && fp.empty()) fail();
    if (ip.empty()) ip = "0";
    if (fp.empty()) fp = "0";
    if (!is_int(ip) || !is_int(fp) || fp[0] == '+' || fp[0] == '-') fail();
    BigInt scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    BigInt n = BigInt(ip) * scale + BigInt(fp);
    if (negative) n = -n;
    return Rational(n, scale);
  }
  if (!is_int(s)) fail();
  return Rational(BigInt(s));
}

// floor(r) for any rational; integer division in cpp_int truncates toward
// zero, so negative non-integers need the usual correction.
inline BigInt floor_rational(const Rational& r) {
  BigInt q = num(r) / den(r);
  if (num(r) < 0 && q * den(r) != num(r)) --q;
  return q;
}

inline BigInt ceil_rational(const Rational& r) {
  BigInt q = num(r) / den(r);
  if (num(r) > 0 && q * den(r) != num(r)) ++q;
  return q;
}

inline Rational pow_rational(const Rational& base, unsigned exp) {
  Rational out = 1;
  for (unsigned i = 0; i < exp; ++i) out *= base;
  return out;
}

inline BigInt pow_bigint(const BigInt& base, unsigned exp) {
  BigInt out = 1;
  for (unsigned i = 0; i < exp; ++i) out *= base;
  return out;
}

inline BigInt binomial(Count n, Count k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt out = 1;
  for (Count i = 1; i <= k; ++i) {
    out *= BigInt(n - k + i);
    out /= BigInt(i);
  }
  return out;
}

// Number of subsets of an n-element set with size at most k; the work bound
// of the exhaustive solvers.
inline BigInt subsets_up_to(Count n, Count k) {
  BigInt out = 0;
  for (Count i = 0; i <= k && i <= n; ++i) out += binomial(n, i);
  return out;
}

// H_n = 1 + 1/2 + ... + 1/n, the exact form behind the picked-variable count
// bound of the negative-side reduction (H_n <= ln(n) + 1 for n >= 1).
inline Rational harmonic(Count n) {
  Rational out = 0;
  for (Count i = 1; i <= n; ++i) out += Rational(1, i);
  return out;
}

namespace detail {
// Truncated series 2 * sum_{j<=terms} t^(2j+1)/(2j+1) with t = (x-1)/(x+1).
// Every omitted term is positive, so the partial sum is a strict lower bound
// on ln(x), and the geometric tail bound below gives a certified upper bound.
inline Rational ln_series(const Rational& x, unsigned terms, Rational* tail) {
  const Rational t = (x - 1) / (x + 1);
  const Rational t2 = t * t;
  Rational power = t;      // t^(2j+1)
  Rational sum = 0;
  for (unsigned j = 0; j <= terms; ++j) {
    sum += power / Rational(2 * j + 1);
    power *= t2;
  }
  if (tail) {
    // remaining terms <= t^(2J+3) / ((2J+3) (1 - t^2))
    *tail = 2 * power / (Rational(2 * terms + 3) * (1 - t2));
  }
  return 2 * sum;
}
}  // namespace detail

// Certified rational bounds ln_lower(x) < ln(x) < ln_upper(x) for x > 1
// (both equal 0 at x = 1).  Used to report the logarithmic closed-form
// bounds without touching floating point.
inline Rational ln_lower(const Rational& x, unsigned terms = 24) {
  if (x <= 0) throw std::domain_error("ln of non-positive rational");
  if (x == 1) return 0;
  if (x < 1) {
    // ln(x) = -ln(1/x) > -(series + tail)
    Rational tail;
    const Rational s = detail::ln_series(Rational(1) / x, terms, &tail);
    return -(s + tail);
  }
  return detail::ln_series(x, terms, nullptr);
}

inline Rational ln_upper(const Rational& x, unsigned terms = 24) {
  if (x <= 0) throw std::domain_error("ln of non-positive rational");
  if (x == 1) return 0;
  if (x < 1) {
    // ln(x) = -ln(1/x) < -series
    return -detail::ln_series(Rational(1) / x, terms, nullptr);
  }
  Rational tail;
  const Rational s = detail::ln_series(x, terms, &tail);
  return s + tail;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace kwsat
