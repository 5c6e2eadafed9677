#include "hlmax/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "hlmax/error.hpp"

namespace hlmax {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::Degenerate: return "degenerate body";
    case ErrorCode::Singular: return "singular matrix";
    case ErrorCode::IllConditioned: return "ill-conditioned";
    case ErrorCode::GeometryMismatch: return "geometry mismatch";
    case ErrorCode::DomainTooSmall: return "domain too small";
    case ErrorCode::NotIsotropic: return "body not isotropic";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Numerical: return "numerical failure";
  }
  return "unknown";
}

namespace {

Rational pow10(long exponent) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent >= 0) return Rational(p);
  Rational r(1, p);
  r.canonicalize();
  return r;
}

Rational parse_decimal(std::string_view text, std::string_view whole) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) fail(ErrorCode::Parse, "not a number: '" + std::string(whole) + "'");
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    bool any_exp = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      exponent = exponent * 10 + (text[i] - '0');
      any_exp = true;
      if (exponent > 100000) fail(ErrorCode::Parse, "exponent out of range: '" + std::string(whole) + "'");
    }
    if (!any_exp) fail(ErrorCode::Parse, "malformed exponent: '" + std::string(whole) + "'");
    if (exp_negative) exponent = -exponent;
  }
  if (i != text.size()) fail(ErrorCode::Parse, "trailing characters in number: '" + std::string(whole) + "'");
  Rational value(mpz_class(digits, 10));
  value *= pow10(exponent - frac_digits);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view t = trim(text);
  if (const auto slash = t.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_decimal(trim(t.substr(0, slash)), text);
    const Rational den = parse_decimal(trim(t.substr(slash + 1)), text);
    if (den == 0) fail(ErrorCode::Parse, "zero denominator: '" + std::string(text) + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }
  return parse_decimal(t, text);
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::InvalidArgument, "non-finite value has no rational form");
  Rational r(value);  // mpq_set_d is exact
  r.canonicalize();
  return r;
}

std::string to_exact_string(const Rational& value) {
  mpz_class den = value.get_den();
  unsigned long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  if (den != 1) return value.get_str();
  const unsigned long scale = twos > fives ? twos : fives;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, scale);
  mpz_class scaled = value.get_num() * ten_pow / value.get_den();
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.get_str();
  if (scale > 0) {
    if (digits.size() <= scale) digits.insert(0, scale - digits.size() + 1, '0');
    digits.insert(digits.size() - scale, ".");
  }
  return negative ? "-" + digits : digits;
}

bool exact_sqrt(const Rational& value, Rational& root) {
  if (value < 0) return false;
  if (!mpz_perfect_square_p(value.get_num_mpz_t()) || !mpz_perfect_square_p(value.get_den_mpz_t())) return false;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), value.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), value.get_den_mpz_t());
  root = Rational(n, d);
  root.canonicalize();
  return true;
}

}  // namespace hlmax
