#pragma once

#include <cmath>
#include <ostream>

#include <Eigen/Core>

namespace housegan::nn {

/// Forward-mode dual number v + d*eps (eps^2 = 0). Running a reverse-mode
/// backward pass in Dual arithmetic with an input tangent yields mixed
/// second derivatives (forward-over-reverse), which is how the gradient
/// penalty's parameter gradient is computed.
template <typename T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(T value) : v(value) {}  // NOLINT: implicit lift of constants
  constexpr Dual(T value, T tangent) : v(value), d(tangent) {}
  template <typename U>
  requires std::is_arithmetic_v<U> && (!std::is_same_v<U, T>)
  constexpr Dual(U value) : v(static_cast<T>(value)) {}  // NOLINT

  constexpr Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  constexpr Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  constexpr Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  constexpr Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }

  friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend constexpr Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend constexpr Dual operator+(const Dual& a) { return a; }

  friend constexpr bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
  friend constexpr bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }
  friend constexpr bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend constexpr bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
  friend constexpr bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
  friend constexpr bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }

  friend std::ostream& operator<<(std::ostream& os, const Dual& a) {
    return os << a.v << "+" << a.d << "e";
  }
};

template <typename T>
Dual<T> tanh(const Dual<T>& x) {
  const T t = std::tanh(x.v);
  return {t, x.d * (T(1) - t * t)};
}
template <typename T>
Dual<T> sqrt(const Dual<T>& x) {
  const T s = std::sqrt(x.v);
  return {s, x.d / (T(2) * s)};
}
template <typename T>
Dual<T> abs(const Dual<T>& x) {
  return x.v < T(0) ? -x : x;
}

/// Primal value, for branching on activations.
inline double primal(double x) { return x; }
inline double primal(float x) { return x; }
template <typename T>
double primal(const Dual<T>& x) { return static_cast<double>(x.v); }

template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};

/// Converts a double into scalar type T (tangent zero for duals).
template <typename T>
T from_double(double x) {
  if constexpr (is_dual<T>::value) {
    return T(static_cast<decltype(T{}.v)>(x));
  } else {
    return static_cast<T>(x);
  }
}

}  // namespace housegan::nn

namespace Eigen {

template <typename T>
struct NumTraits<housegan::nn::Dual<T>> : NumTraits<T> {
  using Real = housegan::nn::Dual<T>;
  using NonInteger = housegan::nn::Dual<T>;
  using Nested = housegan::nn::Dual<T>;
  using Literal = housegan::nn::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 4,
  };
};

}  // namespace Eigen
