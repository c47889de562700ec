#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "qlab/errors.hpp"

namespace qlab {

/// Exact rational over int64 with overflow-checked arithmetic. Intermediate
/// products are carried in __int128 and results must fit back into int64,
/// which is ample for the coefficient sizes produced by the jet calculus.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) {
    if (den_ == 0) throw OverflowError("rational with zero denominator");
    normalize();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
    __int128 d = i128(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw OverflowError("rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }

  /// "3", "-1/2", ...
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

 private:
  using i128 = __int128;

  static Rational make(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lo = INT64_MIN, hi = INT64_MAX;
    if (n < lo || n > hi || d > hi)
      throw OverflowError("rational overflow");
    Rational r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    *this = make(num_, den_);
  }

  long long num_;
  long long den_;
};

/// Exact value num/den over __int128, used where powers k^(2j+1) appear.
/// Only addition and zero-testing are needed along the resonance paths.
struct Q128 {
  __int128 num = 0;
  __int128 den = 1;

  static Q128 of(__int128 n, __int128 d) {
    Q128 q{n, d};
    q.normalize();
    return q;
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num, b = den;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
  }

  bool is_zero() const { return num == 0; }

  Q128 operator+(const Q128& o) const {
    return of(num * o.den + o.num * den, den * o.den);
  }
  Q128 operator-() const { return Q128{-num, den}; }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  bool operator==(const Q128& o) const {
    return num == o.num && den == o.den;
  }
};

}  // namespace qlab
