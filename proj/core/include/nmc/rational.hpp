#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace nmc {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always stored in lowest terms with a positive denominator. Arithmetic is
/// carried out in 128-bit intermediates; a result that does not fit back
/// into 64 bits throws NumericalError instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;

  template <std::integral I>
  constexpr Rational(I value) : num_(static_cast<std::int64_t>(value)) {}  // NOLINT

  Rational(std::int64_t num, std::int64_t den);

  // Floating-point values are never converted implicitly.
  Rational(double) = delete;
  Rational(float) = delete;

  /// Accepts "p/q", integers, and plain or scientific decimals ("0.4", "-1e-3").
  static Rational parse(std::string_view text);

  /// Exact decimal value of the shortest round-trip representation of `v`,
  /// so 0.4 maps to 2/5 rather than to the binary expansion of the double.
  static Rational from_double(double v);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const;
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational abs(const Rational& a) { return a < Rational{0} ? -a : a; }

}  // namespace nmc

namespace Eigen {

template <>
struct NumTraits<nmc::Rational> : GenericNumTraits<nmc::Rational> {
  using Real = nmc::Rational;
  using NonInteger = nmc::Rational;
  using Nested = nmc::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 3,
    MulCost = 3
  };
  static inline Real epsilon() { return Real{0}; }
  static inline Real dummy_precision() { return Real{0}; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
