#include "movelab/rational.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace movelab {

Rat rat_from_string(const std::string& s) {
  if (s.empty()) fail(ErrKind::ParseError, "empty scalar");
  if (s.find('/') != std::string::npos) {
    Rat q;
    if (q.set_str(s, 10) != 0) fail(ErrKind::ParseError, "bad rational '" + s + "'");
    if (q.get_den() == 0) fail(ErrKind::ParseError, "zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find('E') == std::string::npos) {
    Rat q;
    if (q.set_str(s, 10) != 0) fail(ErrKind::ParseError, "bad integer '" + s + "'");
    q.canonicalize();
    return q;
  }
  // Decimal literal: mantissa digits over 10^scale, then apply the exponent.
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  std::string digits;
  long scale = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
    if (s[i] == '.') {
      if (seen_dot) fail(ErrKind::ParseError, "bad decimal '" + s + "'");
      seen_dot = true;
    } else {
      digits += s[i];
      seen_digit = true;
      if (seen_dot) ++scale;
    }
  }
  if (!seen_digit) fail(ErrKind::ParseError, "bad decimal '" + s + "'");
  long expo = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    long sign = 1;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -1;
      ++i;
    }
    if (i == s.size()) fail(ErrKind::ParseError, "bad exponent in '" + s + "'");
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) break;
      expo = expo * 10 + (s[i] - '0');
      if (expo > 100000) fail(ErrKind::ParseError, "exponent overflow in '" + s + "'");
    }
    expo *= sign;
  }
  if (i != s.size()) fail(ErrKind::ParseError, "trailing junk in '" + s + "'");
  mpz_class num(digits.empty() ? "0" : digits, 10);  // explicit base: no octal surprises
  if (neg) num = -num;
  long net = expo - scale;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
  Rat q = net >= 0 ? Rat(num * p10) : Rat(num, p10);
  q.canonicalize();
  return q;
}

std::string rat_to_string(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string double_to_string(double x) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

double double_from_string(const std::string& s) {
  if (s.find('/') != std::string::npos) return to_double(rat_from_string(s));
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail(ErrKind::ParseError, "bad number '" + s + "'");
  return v;
}

}  // namespace movelab
