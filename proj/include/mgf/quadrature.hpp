#pragma once

#include <array>

namespace mgf {

// 8-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree <= 15.
template <typename Scalar = double>
struct GaussLegendre8 {
  static constexpr std::array<Scalar, 8> nodes{
      Scalar(-0.9602898564975362316835609), Scalar(-0.7966664774136267395915539),
      Scalar(-0.5255324099163289858177390), Scalar(-0.1834346424956498049394761),
      Scalar(0.1834346424956498049394761),  Scalar(0.5255324099163289858177390),
      Scalar(0.7966664774136267395915539),  Scalar(0.9602898564975362316835609)};
  static constexpr std::array<Scalar, 8> weights{
      Scalar(0.1012285362903762591525314), Scalar(0.2223810344533744705443560),
      Scalar(0.3137066458778872873379622), Scalar(0.3626837833783619829651504),
      Scalar(0.3626837833783619829651504), Scalar(0.3137066458778872873379622),
      Scalar(0.2223810344533744705443560), Scalar(0.1012285362903762591525314)};
};

template <typename Scalar, typename F>
Scalar integrate_gl8(const F& f, Scalar a, Scalar b) {
  const Scalar mid = (a + b) / 2, half = (b - a) / 2;
  Scalar acc(0);
  for (int i = 0; i < 8; ++i)
    acc += GaussLegendre8<Scalar>::weights[i] * f(mid + half * GaussLegendre8<Scalar>::nodes[i]);
  return acc * half;
}

}  // namespace mgf
