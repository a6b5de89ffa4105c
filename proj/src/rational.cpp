#include "mme/rational.hpp"

#include <cctype>

namespace mme {

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) {
    return q.get_num().get_str();
  }
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

Rational parse_decimal(std::string_view text) {
  std::string digits;
  bool negative = false;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) {
    throw std::invalid_argument("malformed number: '" + std::string(text) + "'");
  }
  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    const std::string rest(text.substr(pos));
    std::size_t used = 0;
    try {
      exponent = std::stol(rest, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
    }
    pos += used;
  }
  if (pos != text.size()) {
    throw std::invalid_argument("trailing characters in number '" + std::string(text) + "'");
  }
  BigInt num(digits, 10);
  if (negative) num = -num;
  const long shift = exponent - frac_digits;
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational out = shift < 0 ? Rational(num, scale) : Rational(num * scale);
  out.canonicalize();
  return out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return parse_decimal(text);
  }
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) {
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  }
  return num / den;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational factorial(unsigned k) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), k);
  return Rational(out);
}

}  // namespace mme
