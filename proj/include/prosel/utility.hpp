#pragma once

// Saturating utility and the utility-weighted similarity kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "prosel/error.hpp"
#include "prosel/matrix.hpp"

namespace prosel {

struct UtilityParams {
  double k = 20.0;    // logistic steepness
  double x0 = 0.8;    // logistic midpoint
  double beta = 0.1;  // weight tie-break coefficient

  void validate() const {
    if (!std::isfinite(k) || !(k > 0.0)) throw ParameterError("k must be a finite positive number");
    if (!std::isfinite(x0)) throw ParameterError("x0 must be finite");
    if (!std::isfinite(beta) || beta < 0.0) throw ParameterError("beta must be finite and nonnegative");
  }
};

inline double logistic(double r, double k, double x0) { return 1.0 / (1.0 + std::exp(-k * (r - x0))); }

inline Vector logistic_transform(const Vector& relevance, const UtilityParams& params = {}) {
  Vector out(relevance.size());
  std::transform(relevance.begin(), relevance.end(), out.begin(),
                 [&](double r) { return logistic(r, params.k, params.x0); });
  return out;
}

/// W / max(W), or all zeros when max(W) is zero.
inline Vector normalize_weights(const Vector& weights) {
  double max_w = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ParameterError("weights must be finite and nonnegative");
    max_w = std::max(max_w, w);
  }
  Vector out(weights.size(), 0.0);
  if (max_w > 0.0)
    for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / max_w;
  return out;
}

/// U = R* + beta * W / max(W). The weight term vanishes when max(W) = 0 or beta = 0.
inline Vector utility(const Vector& relevance_star, const Vector& weights, const UtilityParams& params = {}) {
  if (relevance_star.size() != weights.size()) throw ParameterError("utility: R* and W differ in length");
  const auto wn = normalize_weights(weights);
  Vector u(relevance_star);
  if (params.beta == 0.0) return u;
  for (std::size_t j = 0; j < u.size(); ++j) u[j] += params.beta * wn[j];
  return u;
}

/// L = diag(U) S diag(U).
inline Matrix build_lkernel(const Vector& u, const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() != u.size()) throw ParameterError("build_lkernel: shape mismatch");
  Matrix l(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i; j < s.cols(); ++j) l(i, j) = l(j, i) = u[i] * s(i, j) * u[j];
  return l;
}

}  // namespace prosel
