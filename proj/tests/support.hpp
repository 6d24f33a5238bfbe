#pragma once

// Shared builders for randomized test instances.

#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "prosel/scoring.hpp"
#include "prosel/termspace.hpp"

namespace support {

inline std::string term_name(std::size_t i) { return "t" + std::to_string(i); }

/// Store of `n` Gaussian-random terms named t0..t{n-1}.
inline prosel::EmbeddingStore random_store(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> normal;
  std::vector<prosel::EmbeddingStore::RawEntry> raw;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = normal(rng);
    raw.push_back({term_name(i), std::move(v), 0});
  }
  return prosel::EmbeddingStore::build(std::move(raw));
}

inline prosel::EmbeddingStore store_of(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  std::vector<prosel::EmbeddingStore::RawEntry> raw;
  for (const auto& [term, v] : rows) raw.push_back({term, v, 0});
  return prosel::EmbeddingStore::build(std::move(raw));
}

/// `n` items over a store of `n_terms` terms; roughly a third map to two terms.
inline std::vector<prosel::CandidateItem> random_items(std::mt19937_64& rng, std::size_t n, std::size_t n_terms) {
  std::uniform_int_distribution<std::size_t> pick(0, n_terms - 1);
  std::vector<prosel::CandidateItem> items;
  for (std::size_t j = 0; j < n; ++j) {
    prosel::CandidateItem item{"item" + std::to_string(j), "", {term_name(pick(rng))}};
    if (rng() % 3 == 0) {
      auto other = term_name(pick(rng));
      if (other != item.mapped_terms.front()) item.mapped_terms.push_back(other);
    }
    items.push_back(std::move(item));
  }
  return items;
}

inline prosel::HistoricalProfile random_profile(std::mt19937_64& rng, std::size_t n, std::size_t n_terms) {
  std::uniform_int_distribution<std::size_t> pick(0, n_terms - 1);
  std::uniform_int_distribution<int> weight(0, 10);
  std::vector<prosel::ProfileEntry> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({term_name(pick(rng)), static_cast<double>(weight(rng))});
  return prosel::HistoricalProfile(entries);
}

inline double max_abs_diff(const prosel::Matrix& a, const prosel::Matrix& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

inline double max_abs_diff(const prosel::Vector& a, const prosel::Vector& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace support
