#pragma once

// Spectral selection: eigendecomposition of the L-kernel, subspace size from
// cumulative explained variance, diversity leverage and the ranked selection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "prosel/error.hpp"
#include "prosel/matrix.hpp"
#include "prosel/scoring.hpp"
#include "prosel/symmetric_eigen.hpp"

namespace prosel {

/// Eigenvalues down to -kPsdTolerance are treated as zero; anything lower is
/// a PSD violation.
inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kSymmetryTolerance = 1e-9;

/// Leverage is compared on this grid when ranking, so round-off between
/// numerically identical items cannot override the documented tie-breaks.
inline constexpr double kLeverageResolution = 1e-10;

struct EigenDecomposition {
  Vector eigenvalues;   // descending, clamped at zero
  Matrix eigenvectors;  // column i pairs with eigenvalues[i]
};

inline EigenDecomposition eigendecompose(const Matrix& l) {
  if (l.rows() != l.cols() || l.rows() == 0) throw ParameterError("eigendecompose: kernel must be square and non-empty");
  if (asymmetry(l) > kSymmetryTolerance) throw ParameterError("eigendecompose: kernel is not symmetric");
  auto eig = symmetric_eigen(l);
  for (double& lambda : eig.values) {
    if (lambda < -kPsdTolerance)
      throw ComputeError("kernel is not positive semidefinite (eigenvalue " + text::format_double(lambda) + ")");
    if (lambda < 0.0) lambda = 0.0;
  }
  return {std::move(eig.values), std::move(eig.vectors)};
}

/// Cumulative fraction of total eigenvalue mass captured by the leading axes.
inline Vector explained_curve(std::span<const double> eigenvalues_desc) {
  const double total = std::accumulate(eigenvalues_desc.begin(), eigenvalues_desc.end(), 0.0);
  if (!(total > 0.0)) throw ComputeError("kernel spectrum is identically zero");
  Vector curve(eigenvalues_desc.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    cumulative += eigenvalues_desc[i];
    curve[i] = cumulative / total;
  }
  return curve;
}

inline void validate_info(double info) {
  if (!(info > 0.0 && info <= 1.0)) throw ParameterError("info threshold must lie in (0, 1]");
}

/// Smallest j whose leading j eigenvalues reach the `info` fraction of the total.
inline std::size_t k_optimal(std::span<const double> eigenvalues_desc, double info) {
  validate_info(info);
  if (eigenvalues_desc.empty()) throw ParameterError("k_optimal: empty spectrum");
  for (double lambda : eigenvalues_desc)
    if (lambda < 0.0) throw ParameterError("k_optimal: negative eigenvalue");
  const auto curve = explained_curve(eigenvalues_desc);
  for (std::size_t j = 0; j < curve.size(); ++j)
    if (curve[j] >= info) return j + 1;
  // Only reachable for info = 1 when rounding leaves the final ratio a hair below 1.
  return curve.size();
}

/// Row-wise squared mass over the first k eigenvector columns.
inline Vector leverage(const Matrix& eigenvectors, std::size_t k) {
  if (k < 1 || k > eigenvectors.cols()) throw ParameterError("leverage: k out of range");
  Vector out(eigenvectors.rows(), 0.0);
  for (std::size_t j = 0; j < eigenvectors.rows(); ++j)
    for (std::size_t i = 0; i < k; ++i) out[j] += eigenvectors(j, i) * eigenvectors(j, i);
  return out;
}

/// One row of the selection report.
struct ScoredCandidate {
  std::size_t rank = 0;  // 1-based
  std::string item_id;
  std::string category;
  double relevance = 0.0;
  double weight = 0.0;  // normalized W / max(W)
  double utility = 0.0;
  double leverage = 0.0;
  bool selected = false;
  std::vector<Evidence> evidence;
};

struct SelectionResult {
  std::size_t k_optimal = 0;
  std::size_t n_selected = 0;
  double info = 0.0;
  Vector eigenvalues;
  Vector explained_curve;
  std::vector<ScoredCandidate> ranked;

  std::vector<std::string> selected_ids() const {
    std::vector<std::string> ids;
    for (const auto& c : ranked)
      if (c.selected) ids.push_back(c.item_id);
    return ids;
  }
};

/// Ranks every candidate by (leverage desc, utility desc, item_id asc) and
/// flags the top k_optimal, or the top `select_n` when it is nonzero.
inline SelectionResult select(const std::vector<CandidateItem>& items, const Vector& relevance, const Vector& weight_normalized,
                              const Vector& utility, const Matrix& kernel, double info,
                              const std::vector<std::vector<Evidence>>& evidence, std::size_t select_n = 0) {
  const std::size_t n = items.size();
  if (n == 0) throw InputError("select: no candidate items");
  if (relevance.size() != n || weight_normalized.size() != n || utility.size() != n || kernel.rows() != n ||
      evidence.size() != n)
    throw ParameterError("select: inconsistent dimensions");
  validate_info(info);
  if (select_n > n) throw ParameterError("select_n exceeds the number of candidates");

  SelectionResult result;
  result.info = info;
  auto eig = eigendecompose(kernel);
  Vector lev;
  if (n == 1) {
    result.k_optimal = 1;
    result.explained_curve = {1.0};
    lev = {1.0};
  } else {
    result.explained_curve = explained_curve(eig.eigenvalues);
    result.k_optimal = k_optimal(eig.eigenvalues, info);
    lev = leverage(eig.eigenvectors, result.k_optimal);
  }
  result.eigenvalues = std::move(eig.eigenvalues);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto quantized = [&](std::size_t j) { return std::round(lev[j] / kLeverageResolution); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double la = quantized(a), lb = quantized(b);
    if (la != lb) return la > lb;
    if (utility[a] != utility[b]) return utility[a] > utility[b];
    return items[a].item_id < items[b].item_id;
  });

  result.n_selected = select_n ? select_n : result.k_optimal;
  result.ranked.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = order[r];
    result.ranked.push_back({r + 1, items[j].item_id, items[j].category, relevance[j], weight_normalized[j], utility[j], lev[j],
                             r < result.n_selected, evidence[j]});
  }
  return result;
}

}  // namespace prosel
