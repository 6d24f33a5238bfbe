#pragma once

// End-to-end selection: profile + candidates + embeddings -> ranked report.

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "prosel/error.hpp"
#include "prosel/scoring.hpp"
#include "prosel/spectral.hpp"
#include "prosel/termspace.hpp"
#include "prosel/utility.hpp"

namespace prosel {

struct SelectionParams {
  double info = 0.90;
  double alpha = 0.9;
  UtilityParams utility;
  std::size_t select_n = 0;  // 0: flag exactly k_optimal

  void validate() const {
    validate_info(info);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
    utility.validate();
  }
};

/// Candidate set bound to a store, with the candidate similarity matrix
/// computed once. Reusable across any number of profiles.
class CandidateSpace {
 public:
  CandidateSpace(std::shared_ptr<const EmbeddingStore> store, std::vector<CandidateItem> items)
      : store_(std::move(store)), items_(std::move(items)) {
    if (!store_) throw ParameterError("CandidateSpace: null store");
    validate_candidates(items_);
    similarity_ = build_similarity(items_, *store_);
  }

  const EmbeddingStore& store() const noexcept { return *store_; }
  const std::shared_ptr<const EmbeddingStore>& store_ptr() const noexcept { return store_; }
  const std::vector<CandidateItem>& items() const noexcept { return items_; }
  const Matrix& similarity() const noexcept { return similarity_; }

 private:
  std::shared_ptr<const EmbeddingStore> store_;
  std::vector<CandidateItem> items_;
  Matrix similarity_;
};

/// Every intermediate quantity of one selection, for inspection and tests.
struct SelectionTrace {
  Matrix cross_similarity;  // Q
  Vector relevance;         // R
  PropagatedWeights weights;  // W and evidence
  Vector relevance_star;    // R*
  Vector weight_normalized;
  Vector utility;  // U
  Matrix kernel;   // L
  SelectionResult result;
};

inline SelectionTrace trace_selection(const CandidateSpace& space, const HistoricalProfile& profile,
                                      const SelectionParams& params = {}) {
  params.validate();
  SelectionTrace t;
  t.cross_similarity = build_cross_similarity(profile, space.items(), space.store());
  t.relevance = relevance(t.cross_similarity);
  t.weights = propagate_weights(t.cross_similarity, profile, params.alpha);
  t.relevance_star = logistic_transform(t.relevance, params.utility);
  t.weight_normalized = normalize_weights(t.weights.weights);
  t.utility = utility(t.relevance_star, t.weights.weights, params.utility);
  t.kernel = build_lkernel(t.utility, space.similarity());
  t.result = select(space.items(), t.relevance, t.weight_normalized, t.utility, t.kernel, params.info, t.weights.evidence,
                    params.select_n);
  return t;
}

inline SelectionResult run_selection(const CandidateSpace& space, const HistoricalProfile& profile,
                                     const SelectionParams& params = {}) {
  return trace_selection(space, profile, params).result;
}

}  // namespace prosel
