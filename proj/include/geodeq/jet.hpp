#pragma once

// First-order forward-mode jets over a chart.
//
// A Jet<T> carries a value and the gradient of that value with respect to the
// chart coordinates. The gradient length is fixed per chart; a jet with
// dim() == 0 is a constant and broadcasts against jets of any dimension.
// Mixing two non-constant jets of different dimension is a programming error
// and throws std::logic_error.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <type_traits>

namespace geodeq {

inline constexpr std::size_t kMaxDim = 8;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
class Jet {
 public:
  using value_type = T;

  Jet() = default;
  Jet(T value) : value_(value) {}  // NOLINT: implicit constant promotion
  template <class U>
    requires(std::is_arithmetic_v<U> && !std::is_same_v<U, T>)
  Jet(U value) : value_(static_cast<T>(value)) {}  // NOLINT

  // The coordinate function x_axis at `point`.
  static Jet variable(std::span<const double> point, std::size_t axis) {
    if (point.size() > kMaxDim) throw std::logic_error("jet: chart dimension exceeds kMaxDim");
    if (axis >= point.size()) throw std::out_of_range("jet: seed axis out of range");
    Jet j(static_cast<T>(point[axis]));
    j.dim_ = static_cast<std::uint8_t>(point.size());
    j.grad_[axis] = T(1);
    return j;
  }

  static Jet with_gradient(T value, std::span<const T> grad) {
    if (grad.size() > kMaxDim) throw std::logic_error("jet: gradient too long");
    Jet j(value);
    j.dim_ = static_cast<std::uint8_t>(grad.size());
    for (std::size_t k = 0; k < grad.size(); ++k) j.grad_[k] = grad[k];
    return j;
  }

  const T& value() const { return value_; }
  std::size_t dim() const { return dim_; }
  T grad(std::size_t k) const { return k < dim_ ? grad_[k] : T(0); }
  bool is_constant() const { return dim_ == 0; }

  Jet operator-() const {
    Jet r(*this);
    r.value_ = -value_;
    for (std::size_t k = 0; k < dim_; ++k) r.grad_[k] = -grad_[k];
    return r;
  }

  Jet& operator+=(const Jet& b) {
    const auto d = merged_dim(b);
    value_ += b.value_;
    for (std::size_t k = 0; k < b.dim_; ++k) grad_[k] += b.grad_[k];
    dim_ = d;
    return *this;
  }
  Jet& operator-=(const Jet& b) {
    const auto d = merged_dim(b);
    value_ -= b.value_;
    for (std::size_t k = 0; k < b.dim_; ++k) grad_[k] -= b.grad_[k];
    dim_ = d;
    return *this;
  }
  Jet& operator*=(const Jet& b) {
    const auto d = merged_dim(b);
    for (std::size_t k = 0; k < d; ++k) grad_[k] = grad(k) * b.value_ + value_ * b.grad(k);
    value_ *= b.value_;
    dim_ = d;
    return *this;
  }
  Jet& operator/=(const Jet& b) {
    if (b.value_ == T(0)) throw std::domain_error("jet: division by zero value");
    const auto d = merged_dim(b);
    const T inv = T(1) / b.value_;
    const T q = value_ * inv;
    for (std::size_t k = 0; k < d; ++k) grad_[k] = (grad(k) - q * b.grad(k)) * inv;
    value_ = q;
    dim_ = d;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }

 private:
  std::uint8_t merged_dim(const Jet& b) const {
    if (dim_ == b.dim_ || b.dim_ == 0) return dim_;
    if (dim_ == 0) return b.dim_;
    throw std::logic_error("jet: gradient dimension mismatch");
  }

  T value_{};
  std::array<T, kMaxDim> grad_{};
  std::uint8_t dim_ = 0;
};

using RJet = Jet<double>;
using CJet = Jet<std::complex<double>>;

// Applies a scalar function with known derivative: f(x), f'(x).
template <class T>
Jet<T> chain(const Jet<T>& x, T fx, T dfx) {
  std::array<T, kMaxDim> g{};
  for (std::size_t k = 0; k < x.dim(); ++k) g[k] = dfx * x.grad(k);
  return Jet<T>::with_gradient(fx, std::span<const T>(g.data(), x.dim()));
}

// |x|^p for real jets with nonzero value.
inline RJet pow_abs(const RJet& x, double p) {
  const double v = x.value();
  if (v == 0.0) throw std::domain_error("jet: pow_abs at zero");
  const double a = std::abs(v);
  const double f = std::pow(a, p);
  const double sign = v > 0 ? 1.0 : -1.0;
  return chain(x, f, sign * p * f / a);
}

inline RJet abs(const RJet& x) { return x.value() < 0 ? -x : x; }

inline CJet conj(const CJet& z) {
  std::array<std::complex<double>, kMaxDim> g{};
  for (std::size_t k = 0; k < z.dim(); ++k) g[k] = std::conj(z.grad(k));
  return CJet::with_gradient(std::conj(z.value()), std::span<const std::complex<double>>(g.data(), z.dim()));
}

inline RJet real(const CJet& z) {
  std::array<double, kMaxDim> g{};
  for (std::size_t k = 0; k < z.dim(); ++k) g[k] = z.grad(k).real();
  return RJet::with_gradient(z.value().real(), std::span<const double>(g.data(), z.dim()));
}

inline RJet imag(const CJet& z) {
  std::array<double, kMaxDim> g{};
  for (std::size_t k = 0; k < z.dim(); ++k) g[k] = z.grad(k).imag();
  return RJet::with_gradient(z.value().imag(), std::span<const double>(g.data(), z.dim()));
}

inline CJet to_complex(const RJet& x) {
  std::array<std::complex<double>, kMaxDim> g{};
  for (std::size_t k = 0; k < x.dim(); ++k) g[k] = x.grad(k);
  return CJet::with_gradient(x.value(), std::span<const std::complex<double>>(g.data(), x.dim()));
}

// x + i y
inline CJet make_complex(const RJet& x, const RJet& y) {
  return to_complex(x) + CJet(std::complex<double>(0, 1)) * to_complex(y);
}

// Scalar traits used by the generic linear algebra.
template <class S>
struct scalar_traits {
  using base = S;
  static S value(const S& s) { return s; }
};
template <class T>
struct scalar_traits<Jet<T>> {
  using base = T;
  static T value(const Jet<T>& s) { return s.value(); }
};

template <class S>
auto value_of(const S& s) {
  return scalar_traits<S>::value(s);
}

template <class S>
inline constexpr bool is_jet_v = !std::is_same_v<typename scalar_traits<S>::base, S>;

// Coordinates of a point seeded as jets along every axis.
template <class T = double>
std::array<Jet<T>, kMaxDim> seed_point(std::span<const double> point) {
  std::array<Jet<T>, kMaxDim> out{};
  for (std::size_t k = 0; k < point.size(); ++k) out[k] = Jet<T>::variable(point, k);
  return out;
}

}  // namespace geodeq
