#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

namespace kolmo {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

// Exact dyadic rational num / 2^exp with num >= 0.  Every transition of the
// geometric(1/2) down-walk multiplies by a power of 1/2, so path masses stay
// in this ring exactly; floating point enters only when a mass multiplies a
// kernel value.
class dyadic {
 public:
  dyadic() = default;
  dyadic(unsigned long n) : num_(n) {}

  static dyadic half_pow(long k) {  // 2^{-k}, k >= 0
    if (k < 0) throw std::invalid_argument("dyadic::half_pow: negative k");
    dyadic d(1);
    d.exp_ = k;
    return d;
  }

  bool is_zero() const { return num_ == 0; }

  // this += other * 2^{-halves}
  void add_scaled(const dyadic& other, long halves = 0) {
    if (other.num_ == 0) return;
    long oexp = other.exp_ + halves;
    if (oexp < 0) throw std::invalid_argument("dyadic::add_scaled: negative exponent");
    if (exp_ >= oexp) {
      num_ += other.num_ << (exp_ - oexp);
    } else {
      num_ = (num_ << (oexp - exp_)) + other.num_;
      exp_ = oexp;
    }
    normalize();
  }

  dyadic times_half_pow(long k) const {
    dyadic d = *this;
    d.exp_ += k;
    if (d.exp_ < 0) {
      if (k > 0) throw std::invalid_argument("dyadic::times_half_pow");
      d.num_ <<= -d.exp_;
      d.exp_ = 0;
    }
    d.normalize();
    return d;
  }

  dyadic operator+(const dyadic& o) const {
    dyadic d = *this;
    d.add_scaled(o);
    return d;
  }

  dyadic operator*(const dyadic& o) const {
    dyadic d;
    d.num_ = num_ * o.num_;
    d.exp_ = exp_ + o.exp_;
    d.normalize();
    return d;
  }

  bool operator==(const dyadic& o) const { return num_ == o.num_ && exp_ == o.exp_; }

  // num * 2^{shift - exp} as a double; msb-truncates first so huge exact
  // numerators cannot overflow the conversion.
  double to_double(long shift = 0) const {
    if (num_ == 0) return 0.0;
    long bits = static_cast<long>(boost::multiprecision::msb(num_));
    long drop = bits > 150 ? bits - 150 : 0;
    bigint top = num_ >> drop;
    double m = top.convert_to<double>();
    long e = drop - exp_ + shift;
    if (e > 4000) return HUGE_VAL;
    if (e < -4000) return 0.0;
    return std::ldexp(m, static_cast<int>(e));
  }

  rational to_rational() const {
    return rational(num_, bigint(1) << exp_);
  }

  const bigint& numerator() const { return num_; }
  long exponent() const { return exp_; }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    long tz = static_cast<long>(boost::multiprecision::lsb(num_));
    long s = tz < exp_ ? tz : exp_;
    if (s > 0) {
      num_ >>= s;
      exp_ -= s;
    }
  }

  bigint num_ = 0;
  long exp_ = 0;  // denominator 2^exp_
};

}  // namespace kolmo
