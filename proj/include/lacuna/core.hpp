#ifndef LACUNA_CORE_HPP
#define LACUNA_CORE_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lacuna {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::string_view kVersion = "0.3.0";

// Violated precondition or malformed input. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration or series product exceeded its node budget. Exit code 3.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline BigInt parse_bigint(std::string_view text) {
  if (text.empty()) throw ConfigError("empty integer literal");
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) throw ConfigError("malformed integer '" + std::string(text) + "'");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') throw ConfigError("malformed integer '" + std::string(text) + "'");
  }
  return BigInt(std::string(text[0] == '+' ? text.substr(1) : text));
}

// Accepts "p", "-p", "p/q".
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(text));
  BigInt num = parse_bigint(text.substr(0, slash));
  BigInt den = parse_bigint(text.substr(slash + 1));
  if (den == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

inline std::string to_string(const BigInt& v) { return v.str(); }

inline std::string to_string(const Rational& v) {
  if (denominator(v) == 1) return numerator(v).str();
  return numerator(v).str() + "/" + denominator(v).str();
}

inline double to_double(const Rational& v) { return v.convert_to<double>(); }
inline long double to_long_double(const Rational& v) { return v.convert_to<long double>(); }

inline Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline Rational pow(const Rational& base, unsigned exp) {
  Rational r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

// Node budget shared by the enumeration engines; LACUNA_BUDGET overrides the
// compiled-in default.
inline std::uint64_t budget_or_env(std::uint64_t fallback) {
  if (const char* env = std::getenv("LACUNA_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return fallback;
}

}  // namespace lacuna

#endif  // LACUNA_CORE_HPP
