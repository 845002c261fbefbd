#include "berggren/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "berggren/errors.hpp"

namespace berggren {

namespace {

GaussLegendreRule compute_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's estimate of the i-th largest root, then Newton.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // One more pass keeps dp consistent with the final x.
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw ConfigurationError("Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

GaussLegendreRule gauss_legendre(int n, double a, double b) {
  const auto& base = gauss_legendre(n);
  GaussLegendreRule out;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  out.nodes.reserve(n);
  out.weights.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.nodes.push_back(mid + half * base.nodes[i]);
    out.weights.push_back(half * base.weights[i]);
  }
  return out;
}

ComplexRule gauss_legendre_segment(int n, std::complex<double> a, std::complex<double> b) {
  if (a == b) throw ConfigurationError("zero-length quadrature segment");
  const auto& base = gauss_legendre(n);
  ComplexRule out;
  const std::complex<double> half = 0.5 * (b - a);
  const std::complex<double> mid = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    out.nodes.push_back(mid + half * base.nodes[i]);
    out.weights.push_back(half * base.weights[i]);
  }
  return out;
}

}  // namespace berggren
