#include "multsys/rational.hpp"

#include <cctype>
#include <cmath>

#include "multsys/error.hpp"

namespace multsys {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Accepts an optional sign followed by digits.
bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  return all_digits(s);
}

mpz_class parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::ParseError, "empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_integer_literal(num) || !all_digits(den)) {
      throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(text) + "'");
    }
    mpz_class d = parse_integer(den);
    if (d == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    Rational r(parse_integer(num), d);
    r.canonicalize();
    return r;
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw Error(ErrorCode::ParseError, "malformed decimal '" + std::string(text) + "'");
    }
    mpz_class digits(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    Rational r(digits, scale);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }

  if (!is_integer_literal(text)) {
    throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(text) + "'");
  }
  return Rational(parse_integer(text));
}

std::string to_string(const Rational& value) { return value.get_str(); }

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::ParseError, "non-finite value");
  Rational r;
  mpq_set_d(r.get_mpq_t(), value);
  return r;
}

double to_double(const Rational& value) { return value.get_d(); }

Rational ratio(long num, unsigned long den) {
  Rational out(num, den);
  out.canonicalize();
  return out;
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

Rational pow(const Rational& value, unsigned exponent) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), value.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), value.get_den_mpz_t(), exponent);
  // Powers of coprime integers stay coprime.
  return Rational(num, den);
}

int sign(const Rational& value) { return sgn(value); }

}  // namespace multsys
