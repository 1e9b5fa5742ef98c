#ifndef LACUNA_IO_HPP
#define LACUNA_IO_HPP

#include "lacuna/core.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/trigpoly.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lacuna::io {

using nlohmann::json;

struct ParsedSequence {
  SequenceSpec spec;
  std::optional<std::size_t> length;  // length carried by the spec, if any
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::size_t parse_count(const std::string& s) {
  BigInt v = parse_bigint(s);
  if (v < 1 || v > 1'000'000) throw ConfigError("length '" + s + "' out of range");
  return v.convert_to<std::size_t>();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Integers arrive as decimal strings; plain JSON integers are accepted too.
inline std::string scalar_text(const json& v, const char* field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ConfigError(std::string("field '") + field + "' must be a decimal string");
}

inline const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw ConfigError(std::string("sequence spec is missing '") + name + "'");
  return j.at(name);
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

inline ParsedSequence sequence_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("sequence spec must be a JSON object");
  const std::string kind = detail::scalar_text(detail::field(j, "kind"), "kind");
  ParsedSequence out;
  if (j.contains("n")) {
    if (!j.at("n").is_number_unsigned()) throw ConfigError("'n' must be a positive integer");
    out.length = j.at("n").get<std::size_t>();
  }
  if (kind == "explicit") {
    ExplicitSpec s;
    for (const auto& t : detail::field(j, "terms")) s.terms.push_back(parse_bigint(detail::scalar_text(t, "terms")));
    if (!out.length) out.length = s.terms.size();
    out.spec = std::move(s);
  } else if (kind == "geometric") {
    Rational q = parse_rational(detail::scalar_text(detail::field(j, "q"), "q"));
    BigInt a1 = j.contains("a1") ? parse_bigint(detail::scalar_text(j.at("a1"), "a1")) : BigInt(0);
    if (!j.contains("a1")) {
      if (denominator(q) != 1) throw ConfigError("geometric spec with rational q needs an explicit a1");
      a1 = numerator(q);
    }
    out.spec = GeometricSpec{a1, q};
  } else if (kind == "ratios") {
    RatiosSpec s{parse_bigint(detail::scalar_text(detail::field(j, "a1"), "a1")), {}};
    for (const auto& r : detail::field(j, "ratios")) s.ratios.push_back(parse_rational(detail::scalar_text(r, "ratios")));
    if (!out.length) out.length = s.ratios.size() + 1;
    out.spec = std::move(s);
  } else if (kind == "schedule") {
    BigInt base = parse_bigint(detail::scalar_text(detail::field(j, "base"), "base"));
    BigInt e = parse_bigint(detail::scalar_text(detail::field(j, "exponent"), "exponent"));
    if (e < 1 || e > 16) throw ConfigError("schedule exponent out of range");
    out.spec = ScheduleSpec{base, e.convert_to<unsigned>()};
  } else {
    throw ConfigError("unknown sequence kind '" + kind + "'");
  }
  return out;
}

/// Shorthands:
///   geometric:q:n        a_k = q^k
///   schedule:b:e:n       a_k = b^(k^e)
///   explicit:3,7,20
///   ratios:a1:r1,r2,...
/// A leading '{' is read as JSON, a leading '@' names a JSON file.
inline ParsedSequence parse_sequence(const std::string& text) {
  if (text.empty()) throw ConfigError("empty sequence spec");
  if (text[0] == '@') return sequence_from_json(detail::parse_json(detail::read_file(text.substr(1))));
  if (text[0] == '{') return sequence_from_json(detail::parse_json(text));
  auto parts = detail::split(text, ':');
  const std::string& kind = parts[0];
  ParsedSequence out;
  if (kind == "geometric" && parts.size() == 3) {
    Rational q = parse_rational(parts[1]);
    if (denominator(q) != 1) throw ConfigError("geometric shorthand needs an integer ratio; use a JSON spec with a1");
    out.spec = GeometricSpec{numerator(q), q};
    out.length = detail::parse_count(parts[2]);
  } else if (kind == "schedule" && parts.size() == 4) {
    BigInt e = parse_bigint(parts[2]);
    if (e < 1 || e > 16) throw ConfigError("schedule exponent out of range");
    out.spec = ScheduleSpec{parse_bigint(parts[1]), e.convert_to<unsigned>()};
    out.length = detail::parse_count(parts[3]);
  } else if (kind == "explicit" && parts.size() == 2) {
    ExplicitSpec s;
    for (const auto& t : detail::split(parts[1], ',')) s.terms.push_back(parse_bigint(t));
    out.length = s.terms.size();
    out.spec = std::move(s);
  } else if (kind == "ratios" && parts.size() == 3) {
    RatiosSpec s{parse_bigint(parts[1]), {}};
    for (const auto& r : detail::split(parts[2], ',')) s.ratios.push_back(parse_rational(r));
    out.length = s.ratios.size() + 1;
    out.spec = std::move(s);
  } else {
    throw ConfigError("unrecognized sequence spec '" + text + "'");
  }
  return out;
}

/// Builds the sequence; an explicit `n` overrides the length carried by the spec.
inline LacunarySequence load_sequence(const std::string& text, std::optional<std::size_t> n = std::nullopt) {
  auto parsed = parse_sequence(text);
  std::size_t len = n ? *n : parsed.length.value_or(0);
  if (len == 0) throw ConfigError("sequence length unknown; pass --n");
  return build_sequence(parsed.spec, len);
}

inline TrigPoly poly_from_json(const json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j.at("coeffs").is_object()) {
    throw ConfigError("polynomial spec must look like {\"coeffs\": {\"1\": \"1/2\"}}");
  }
  std::map<int, Rational> coeffs;
  for (const auto& [key, value] : j.at("coeffs").items()) {
    BigInt d = parse_bigint(key);
    if (d > 10'000 || d < -10'000) throw ConfigError("frequency " + key + " out of range");
    coeffs[d.convert_to<int>()] = parse_rational(detail::scalar_text(value, "coeffs"));
  }
  return TrigPoly(coeffs);
}

/// "cosine", "telescope", "coeffs:1=1/2,3=1/4", inline JSON, or @file.json.
inline TrigPoly parse_poly(const std::string& text) {
  if (text == "cosine") return TrigPoly::cosine();
  if (text == "telescope") return TrigPoly::telescope();
  if (text.empty()) throw ConfigError("empty polynomial spec");
  if (text[0] == '@') return poly_from_json(detail::parse_json(detail::read_file(text.substr(1))));
  if (text[0] == '{') return poly_from_json(detail::parse_json(text));
  if (text.rfind("coeffs:", 0) == 0) {
    std::map<int, Rational> coeffs;
    for (const auto& item : detail::split(text.substr(7), ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("expected d=c in '" + item + "'");
      BigInt d = parse_bigint(item.substr(0, eq));
      if (d > 10'000 || d < -10'000) throw ConfigError("frequency out of range in '" + item + "'");
      coeffs[d.convert_to<int>()] = parse_rational(item.substr(eq + 1));
    }
    return TrigPoly(coeffs);
  }
  throw ConfigError("unrecognized polynomial spec '" + text + "'");
}

/// Fixed-format real for byte-stable output.
inline std::string num(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15Lg", v);
  return buf;
}

}  // namespace lacuna::io

#endif  // LACUNA_IO_HPP
