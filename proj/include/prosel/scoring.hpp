#pragma once

// Candidate/profile similarity, relevance and weight propagation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "prosel/error.hpp"
#include "prosel/matrix.hpp"
#include "prosel/termspace.hpp"
#include "prosel/text.hpp"

namespace prosel {

/// A selectable item mapped to one or more vocabulary terms.
struct CandidateItem {
  std::string item_id;
  std::string category;
  std::vector<std::string> mapped_terms;

  friend bool operator==(const CandidateItem&, const CandidateItem&) = default;
};

inline void validate_candidates(const std::vector<CandidateItem>& items) {
  if (items.empty()) throw InputError("candidate set is empty");
  std::unordered_set<std::string> ids;
  for (const auto& item : items) {
    if (item.item_id.empty()) throw InputError("candidate with empty item_id");
    if (item.mapped_terms.empty()) throw InputError("candidate \"" + item.item_id + "\" has no mapped terms");
    if (!ids.insert(item.item_id).second) throw InputError("duplicate candidate item_id \"" + item.item_id + "\"");
  }
}

struct ProfileEntry {
  std::string term;
  double weight = 1.0;
};

/// Observed terms with nonnegative importance weights. Repeated terms are
/// merged by summing weights; first-occurrence order is kept.
class HistoricalProfile {
 public:
  explicit HistoricalProfile(const std::vector<ProfileEntry>& entries) {
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& e : entries) {
      auto term = canonical_term(e.term);
      if (!std::isfinite(e.weight) || e.weight < 0.0)
        throw InputError("profile term \"" + term + "\": weight must be finite and nonnegative");
      if (auto it = index.find(term); it != index.end()) {
        entries_[it->second].weight += e.weight;
      } else {
        index.emplace(term, entries_.size());
        entries_.push_back({std::move(term), e.weight});
      }
    }
    if (entries_.empty()) throw InputError("historical profile is empty");
  }

  const std::vector<ProfileEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::vector<std::string> terms() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.term);
    return out;
  }

 private:
  std::vector<ProfileEntry> entries_;
};

namespace detail {

inline bool is_comment_or_blank(std::string_view line) {
  auto t = text::trim_view(line);
  return t.empty() || t.front() == '#';
}

}  // namespace detail

/// Candidate file: `item_id,category,term_1[;term_2...]`. A first row whose
/// first field is "item_id" is treated as a header.
inline std::vector<CandidateItem> parse_candidates_csv(std::string_view content, std::string_view source = "<memory>") {
  const std::string src(source);
  std::vector<CandidateItem> items;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  bool first = true;
  for (auto line : text::lines(content)) {
    ++line_no;
    if (detail::is_comment_or_blank(line)) continue;
    std::vector<std::string> fields;
    try {
      fields = text::parse_csv_record(line);
    } catch (const InputError& e) {
      throw InputError(src, line_no, e.what());
    }
    if (first && text::trim_view(fields.front()) == "item_id") {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() != 3) throw InputError(src, line_no, "expected 3 fields (item_id,category,terms), got " + std::to_string(fields.size()));
    CandidateItem item{text::trim(fields[0]), text::trim(fields[1]), {}};
    if (item.item_id.empty()) throw InputError(src, line_no, "empty item_id");
    for (auto t : text::split(fields[2], ';')) {
      auto term = text::trim(t);
      if (!term.empty()) item.mapped_terms.push_back(std::move(term));
    }
    if (item.mapped_terms.empty()) throw InputError(src, line_no, "item \"" + item.item_id + "\" has no mapped terms");
    if (!ids.insert(item.item_id).second) throw InputError(src, line_no, "duplicate item_id \"" + item.item_id + "\"");
    items.push_back(std::move(item));
  }
  if (items.empty()) throw InputError(src + ": no candidate items");
  return items;
}

/// Profile file: `term,weight` with the weight optional (blank means 1).
inline HistoricalProfile parse_profile_csv(std::string_view content, std::string_view source = "<memory>") {
  const std::string src(source);
  std::vector<ProfileEntry> entries;
  std::size_t line_no = 0;
  bool first = true;
  for (auto line : text::lines(content)) {
    ++line_no;
    if (detail::is_comment_or_blank(line)) continue;
    std::vector<std::string> fields;
    try {
      fields = text::parse_csv_record(line);
    } catch (const InputError& e) {
      throw InputError(src, line_no, e.what());
    }
    if (first && text::trim_view(fields.front()) == "term") {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() > 2) throw InputError(src, line_no, "expected at most 2 fields (term,weight)");
    ProfileEntry e{text::trim(fields[0]), 1.0};
    if (e.term.empty()) throw InputError(src, line_no, "empty term");
    if (fields.size() == 2 && !text::trim_view(fields[1]).empty()) {
      auto w = text::parse_double(fields[1]);
      if (!w || !std::isfinite(*w) || *w < 0.0)
        throw InputError(src, line_no, "term \"" + e.term + "\": invalid weight '" + fields[1] + "'");
      e.weight = *w;
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw InputError(src + ": profile has no entries");
  return HistoricalProfile(entries);
}

/// Single term: that embedding. Several terms: their renormalized mean.
inline Vector item_embedding(const CandidateItem& item, const EmbeddingStore& store) {
  store.require_all(item.mapped_terms);
  if (item.mapped_terms.size() == 1) {
    auto v = store.at(item.mapped_terms.front());
    return Vector(v.begin(), v.end());
  }
  Vector mean(store.dimension(), 0.0);
  for (const auto& t : item.mapped_terms) {
    auto v = store.at(t);
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += v[d];
  }
  const double norm = std::sqrt(dot(mean, mean));
  if (!(norm > 1e-12)) throw InputError("item \"" + item.item_id + "\": mapped terms cancel out (zero-norm mean embedding)");
  for (auto& x : mean) x /= norm;
  return mean;
}

/// Cosine of unit vectors, clamped to [-1, 1] against round-off.
inline double unit_cosine(std::span<const double> a, std::span<const double> b) {
  return std::clamp(dot(a, b), -1.0, 1.0);
}

inline void require_item_terms(const std::vector<CandidateItem>& items, const EmbeddingStore& store) {
  std::vector<std::string> all;
  for (const auto& item : items) all.insert(all.end(), item.mapped_terms.begin(), item.mapped_terms.end());
  store.require_all(all);
}

/// Candidate-candidate cosine similarity of item embeddings.
inline Matrix build_similarity(const std::vector<CandidateItem>& items, const EmbeddingStore& store) {
  if (items.empty()) throw InputError("build_similarity: no candidate items");
  require_item_terms(items, store);
  std::vector<Vector> emb;
  emb.reserve(items.size());
  for (const auto& item : items) emb.push_back(item_embedding(item, store));
  const std::size_t n = items.size();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) s(i, j) = s(j, i) = unit_cosine(emb[i], emb[j]);
  }
  return s;
}

/// Profile-candidate similarity: entry (i, j) is the best cosine between
/// profile term i and any mapped term of item j. For single-term items this
/// is the plain dot product with the item embedding.
inline Matrix build_cross_similarity(const HistoricalProfile& profile, const std::vector<CandidateItem>& items,
                                     const EmbeddingStore& store) {
  {
    auto needed = profile.terms();
    for (const auto& item : items) needed.insert(needed.end(), item.mapped_terms.begin(), item.mapped_terms.end());
    store.require_all(needed);
  }
  Matrix q(profile.size(), items.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto e = store.at(profile.entries()[i].term);
    for (std::size_t j = 0; j < items.size(); ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& t : items[j].mapped_terms) best = std::max(best, unit_cosine(e, store.at(t)));
      q(i, j) = best;
    }
  }
  return q;
}

/// Column-wise maximum of Q.
inline Vector relevance(const Matrix& q) {
  if (q.rows() == 0 || q.cols() == 0) throw InputError("relevance: empty similarity matrix");
  Vector r(q.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) r[j] = std::max(r[j], q(i, j));
  return r;
}

struct Evidence {
  std::string term;
  double similarity = 0.0;
  double weight = 0.0;

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct PropagatedWeights {
  Vector weights;                              // W, one per item
  std::vector<std::vector<Evidence>> evidence;  // per item, by similarity descending
};

/// Sums the weights of profile terms whose similarity to item j exceeds
/// alpha * max_i Q(i, j). Rows attaining the column maximum always count.
inline PropagatedWeights propagate_weights(const Matrix& q, const HistoricalProfile& profile, double alpha = 0.9) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
  if (q.rows() != profile.size()) throw ParameterError("propagate_weights: Q rows do not match profile size");
  const auto r = relevance(q);
  PropagatedWeights out{Vector(q.cols(), 0.0), std::vector<std::vector<Evidence>>(q.cols())};
  for (std::size_t j = 0; j < q.cols(); ++j) {
    const double threshold = alpha * r[j];
    auto& ev = out.evidence[j];
    for (std::size_t i = 0; i < q.rows(); ++i) {
      const double sim = q(i, j);
      if (sim > threshold || sim == r[j]) {
        const auto& entry = profile.entries()[i];
        out.weights[j] += entry.weight;
        ev.push_back({entry.term, sim, entry.weight});
      }
    }
    std::stable_sort(ev.begin(), ev.end(), [](const Evidence& a, const Evidence& b) { return a.similarity > b.similarity; });
  }
  return out;
}

}  // namespace prosel
