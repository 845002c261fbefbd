#pragma once

#include <complex>
#include <vector>

namespace berggren {

/// Gauss-Legendre rule on [-1, 1], nodes in increasing order.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule computed by Newton iteration on P_n. Results are cached per n.
const GaussLegendreRule& gauss_legendre(int n);

/// Rule mapped affinely onto the real interval [a, b].
GaussLegendreRule gauss_legendre(int n, double a, double b);

/// Rule mapped affinely onto the complex segment [a, b]; weights are complex.
struct ComplexRule {
  std::vector<std::complex<double>> nodes;
  std::vector<std::complex<double>> weights;
};
ComplexRule gauss_legendre_segment(int n, std::complex<double> a, std::complex<double> b);

}  // namespace berggren
