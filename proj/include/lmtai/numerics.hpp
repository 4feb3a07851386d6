#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmtai {

using cd = std::complex<double>;

template <std::size_t N>
using CVec = std::array<cd, N>;

class IntegrationError : public std::runtime_error {
public:
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what + " at t=" + std::to_string(t)), t_(t) {}
  double time() const { return t_; }

private:
  double t_;
};

template <std::size_t N>
bool all_finite(const CVec<N>& v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

// Classic four-stage RK4. f(state, t) -> derivative.
template <std::size_t N, class F>
CVec<N> rk4_step(const CVec<N>& x, double t, double dt, F&& f) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  const double h2 = 0.5 * dt;
  CVec<N> tmp;

  const CVec<N> k1 = f(x, t);
  if (!all_finite(k1)) throw IntegrationError("non-finite derivative", t);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h2 * k1[i];

  const CVec<N> k2 = f(tmp, t + h2);
  if (!all_finite(k2)) throw IntegrationError("non-finite derivative", t + h2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h2 * k2[i];

  const CVec<N> k3 = f(tmp, t + h2);
  if (!all_finite(k3)) throw IntegrationError("non-finite derivative", t + h2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + dt * k3[i];

  const CVec<N> k4 = f(tmp, t + dt);
  if (!all_finite(k4)) throw IntegrationError("non-finite derivative", t + dt);

  CVec<N> out;
  const double h6 = dt / 6.0;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = x[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Fixed steps of size dt from t0; the last step is shortened to land on t1.
template <std::size_t N, class F>
CVec<N> integrate(CVec<N> x, double t0, double t1, double dt, F&& f) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (t1 < t0) throw std::invalid_argument("integrate: t1 < t0");
  const double span = t1 - t0;
  if (span == 0.0) return x;
  auto n = static_cast<long long>(std::floor(span / dt));
  double rem = span - static_cast<double>(n) * dt;
  if (rem < 1e-9 * dt) rem = 0.0;
  if (rem > dt * (1.0 - 1e-9)) {
    ++n;
    rem = 0.0;
  }
  for (long long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const double h = (k == n - 1 && rem == 0.0) ? (t1 - t) : dt;
    x = rk4_step<N>(x, t, h, f);
  }
  if (rem > 0.0) {
    const double t = t0 + static_cast<double>(n) * dt;
    x = rk4_step<N>(x, t, t1 - t, f);
  }
  return x;
}

// RK4 on a constant linear field x' = A x reduces to one fixed step matrix;
// n steps are applied by binary powering.
struct Mat2 {
  cd a, b, c, d;
};

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline Mat2 rk4_step_matrix(const Mat2& A, double h) {
  const Mat2 I{1.0, 0.0, 0.0, 1.0};
  const Mat2 hA{h * A.a, h * A.b, h * A.c, h * A.d};
  const Mat2 hA2 = mul(hA, hA);
  const Mat2 hA3 = mul(hA2, hA);
  const Mat2 hA4 = mul(hA3, hA);
  return {I.a + hA.a + hA2.a / 2.0 + hA3.a / 6.0 + hA4.a / 24.0,
          I.b + hA.b + hA2.b / 2.0 + hA3.b / 6.0 + hA4.b / 24.0,
          I.c + hA.c + hA2.c / 2.0 + hA3.c / 6.0 + hA4.c / 24.0,
          I.d + hA.d + hA2.d / 2.0 + hA3.d / 6.0 + hA4.d / 24.0};
}

inline Mat2 mat_pow(Mat2 base, long long n) {
  Mat2 r{1.0, 0.0, 0.0, 1.0};
  while (n > 0) {
    if (n & 1) r = mul(r, base);
    base = mul(base, base);
    n >>= 1;
  }
  return r;
}

}  // namespace lmtai
