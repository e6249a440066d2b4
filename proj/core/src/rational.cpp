#include "nmc/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <system_error>

#include "nmc/errors.hpp"
#include "nmc/linalg.hpp"

namespace nmc {
namespace {

__extension__ using Wide = __int128;

std::int64_t narrow(Wide v) {
  if (v > INT64_MAX || v < INT64_MIN) throw NumericalError("rational overflow");
  return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make(Wide num, Wide den) {
  if (den == 0) throw NumericalError("rational division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(narrow(num), narrow(den));
}

Wide pow10(int e) {
  Wide r = 1;
  for (int i = 0; i < e; ++i) {
    r *= 10;
    if (r > INT64_MAX) throw NumericalError("rational overflow");
  }
  return r;
}

[[noreturn]] void bad_text(std::string_view text) {
  throw ValidationError("not a rational number: \"" + std::string(text) + "\"");
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) bad_text(whole);
  return v;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  int exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view es = s.substr(e + 1);
    if (!es.empty() && es.front() == '+') es.remove_prefix(1);
    exponent = static_cast<int>(parse_int(es, text));
    s = s.substr(0, e);
  }
  Wide mantissa = 0;
  int digits = 0;
  bool seen_point = false;
  int fraction_digits = 0;
  for (char c : s) {
    if (c == '.') {
      if (seen_point) bad_text(text);
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') bad_text(text);
    mantissa = mantissa * 10 + (c - '0');
    if (mantissa > INT64_MAX) throw NumericalError("rational overflow parsing \"" + std::string(text) + "\"");
    ++digits;
    if (seen_point) ++fraction_digits;
  }
  if (digits == 0) bad_text(text);
  if (negative) mantissa = -mantissa;
  int scale = exponent - fraction_digits;
  if (scale >= 0) return make(mantissa * pow10(scale), 1);
  return make(mantissa, pow10(-scale));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw NumericalError("rational with zero denominator");
  Wide n = num, d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  Wide g = wide_gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = narrow(n);
  den_ = narrow(d);
}

Rational Rational::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  std::int64_t n = parse_int(text.substr(0, slash), text);
  std::int64_t d = parse_int(text.substr(slash + 1), text);
  if (d == 0) throw ValidationError("zero denominator in \"" + std::string(text) + "\"");
  return Rational(n, d);
}

Rational Rational::from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("cannot convert a non-finite double to a rational");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericalError("cannot format double");
  return parse_decimal(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

double Rational::to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const { return make(-static_cast<Wide>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
  return *this = make(static_cast<Wide>(num_) * o.den_ + static_cast<Wide>(o.num_) * den_,
                      static_cast<Wide>(den_) * o.den_);
}

Rational& Rational::operator-=(const Rational& o) {
  return *this = make(static_cast<Wide>(num_) * o.den_ - static_cast<Wide>(o.num_) * den_,
                      static_cast<Wide>(den_) * o.den_);
}

Rational& Rational::operator*=(const Rational& o) {
  return *this = make(static_cast<Wide>(num_) * o.num_, static_cast<Wide>(den_) * o.den_);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw NumericalError("rational division by zero");
  return *this = make(static_cast<Wide>(num_) * o.den_, static_cast<Wide>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide lhs = static_cast<Wide>(a.num_) * b.den_;
  Wide rhs = static_cast<Wide>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

RationalMatrix to_rational(const Matrix& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational::from_double(m(i, j));
  return out;
}

Matrix to_double(const RationalMatrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_double();
  return out;
}

}  // namespace nmc
