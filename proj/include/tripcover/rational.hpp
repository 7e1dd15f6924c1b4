#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tripcover {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request exceeded one of the configured desk-scale ceilings.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Parses "3", "-2", "7/2" or "0.125" into an exact rational.
/// Throws Error on anything else.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw Error("invalid rational literal '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();

  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    pos = 1;
  }
  auto digits = [&](std::size_t from) {
    std::size_t to = from;
    while (to < text.size() && std::isdigit(static_cast<unsigned char>(text[to]))) ++to;
    return to;
  };

  std::size_t int_end = digits(pos);
  BigInt num(0);
  BigInt den(1);
  if (int_end > pos) num = BigInt(std::string(text.substr(pos, int_end - pos)));

  if (int_end == text.size()) {
    if (int_end == pos) return fail();
  } else if (text[int_end] == '/') {
    if (int_end == pos) return fail();
    std::size_t den_end = digits(int_end + 1);
    if (den_end == int_end + 1 || den_end != text.size()) return fail();
    den = BigInt(std::string(text.substr(int_end + 1)));
    if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
  } else if (text[int_end] == '.') {
    std::size_t frac_end = digits(int_end + 1);
    std::size_t frac_len = frac_end - (int_end + 1);
    if (frac_end != text.size() || (frac_len == 0 && int_end == pos)) return fail();
    for (std::size_t i = 0; i < frac_len; ++i) {
      num = num * 10 + (text[int_end + 1 + i] - '0');
      den *= 10;
    }
  } else {
    return fail();
  }

  Rational value(num, den);
  return negative ? Rational(-value) : value;
}

/// "7/2", "3", "-1/4".
inline std::string format_rational(const Rational& value) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

}  // namespace tripcover
