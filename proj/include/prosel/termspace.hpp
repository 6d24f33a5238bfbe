#pragma once

// Term embeddings: loading, validation, normalization, serialization and
// synthetic vocabulary generation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "prosel/error.hpp"
#include "prosel/rng.hpp"
#include "prosel/text.hpp"

namespace prosel {

/// Canonical form of a term identifier: surrounding whitespace removed, non-empty.
inline std::string canonical_term(std::string_view raw) {
  auto id = text::trim(raw);
  if (id.empty()) throw InputError("empty term identifier");
  return id;
}

enum class StoreFormat { tsv, json };

/// Unit-norm embeddings keyed by term identifier. Immutable once built.
class EmbeddingStore {
 public:
  struct RawEntry {
    std::string term;
    std::vector<double> vector;
    std::size_t line = 0;  // 0 when unknown
  };

  EmbeddingStore() = default;

  /// Validates and normalizes raw vectors. Rejects empty input, inconsistent
  /// dimensions, duplicate terms, non-finite components and zero vectors.
  static EmbeddingStore build(std::vector<RawEntry> entries, std::string_view source = "<memory>") {
    const std::string src(source);
    if (entries.empty()) throw InputError(src + ": embedding store has no entries");
    EmbeddingStore store;
    store.dimension_ = entries.front().vector.size();
    if (store.dimension_ == 0) throw InputError(src, entries.front().line, "term \"" + entries.front().term + "\" has no components");
    store.ids_.reserve(entries.size());
    store.data_.reserve(entries.size() * store.dimension_);
    for (auto& e : entries) {
      auto fail = [&](const std::string& msg) { throw InputError(src, e.line, "term \"" + e.term + "\": " + msg); };
      if (text::trim_view(e.term).empty()) throw InputError(src, e.line, "empty term identifier");
      e.term = text::trim(e.term);
      if (e.vector.size() != store.dimension_)
        fail("dimension mismatch (expected " + std::to_string(store.dimension_) + ", got " +
             std::to_string(e.vector.size()) + ")");
      double norm2 = 0.0;
      for (double v : e.vector) {
        if (!std::isfinite(v)) fail("non-finite component");
        norm2 += v * v;
      }
      if (!(norm2 > 0.0)) fail("zero-norm vector");
      if (store.index_.count(e.term)) fail("duplicate term");
      const double inv = 1.0 / std::sqrt(norm2);
      store.index_.emplace(e.term, store.ids_.size());
      store.ids_.push_back(std::move(e.term));
      for (double v : e.vector) store.data_.push_back(v * inv);
    }
    return store;
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& terms() const noexcept { return ids_; }

  bool contains(std::string_view term) const { return index_.count(std::string(term)) != 0; }

  std::optional<std::span<const double>> find(std::string_view term) const {
    const auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return vector_at(it->second);
  }

  std::span<const double> at(std::string_view term) const {
    if (auto v = find(term)) return *v;
    throw UnresolvedTermsError({std::string(term)});
  }

  /// Throws one error listing every term not present in the store.
  template <typename Range>
  void require_all(const Range& terms) const {
    std::vector<std::string> missing;
    for (const auto& t : terms)
      if (!contains(t) && std::find(missing.begin(), missing.end(), t) == missing.end()) missing.emplace_back(t);
    if (!missing.empty()) throw UnresolvedTermsError(std::move(missing));
  }

  std::span<const double> vector_at(std::size_t index) const {
    return {data_.data() + index * dimension_, dimension_};
  }

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
    return a.dimension_ == b.dimension_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline EmbeddingStore parse_tsv_store(std::string_view content, const std::string& source) {
  std::vector<EmbeddingStore::RawEntry> entries;
  std::size_t line_no = 0;
  for (auto line : text::lines(content)) {
    ++line_no;
    if (text::trim_view(line).empty() || text::trim_view(line).front() == '#') continue;
    auto fields = text::split(line, '\t');
    const auto term = text::trim(fields.front());
    if (term.empty()) throw InputError(source, line_no, "empty term identifier");
    if (fields.size() < 2) throw InputError(source, line_no, "term \"" + term + "\": no vector components");
    EmbeddingStore::RawEntry e{term, {}, line_no};
    e.vector.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto v = text::parse_double(fields[i]);
      if (!v)
        throw InputError(source, line_no,
                         "term \"" + term + "\": unparsable component " + std::to_string(i) + " '" +
                             std::string(fields[i]) + "'");
      e.vector.push_back(*v);
    }
    entries.push_back(std::move(e));
  }
  return EmbeddingStore::build(std::move(entries), source);
}

inline EmbeddingStore parse_json_store(std::string_view content, const std::string& source) {
  using json = nlohmann::ordered_json;
  // Duplicate object keys are silently collapsed by the DOM, so catch them while parsing.
  std::unordered_map<std::string, int> seen;
  std::optional<std::string> duplicate;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth == 2 && parsed.is_string()) {
      const auto key = parsed.get<std::string>();
      if (++seen[key] == 2 && !duplicate) duplicate = key;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(content.begin(), content.end(), cb);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("terms") || !doc["terms"].is_object())
    throw InputError(source + ": expected an object with a \"terms\" object");
  if (duplicate) throw InputError(source + ": term \"" + *duplicate + "\": duplicate term");
  std::optional<std::size_t> declared;
  if (doc.contains("dimension")) {
    if (!doc["dimension"].is_number_unsigned()) throw InputError(source + ": \"dimension\" must be a positive integer");
    declared = doc["dimension"].get<std::size_t>();
  }
  std::vector<EmbeddingStore::RawEntry> entries;
  for (const auto& [term, arr] : doc["terms"].items()) {
    if (!arr.is_array()) throw InputError(source + ": term \"" + term + "\": vector must be an array");
    EmbeddingStore::RawEntry e{term, {}, 0};
    for (const auto& v : arr) {
      if (!v.is_number()) throw InputError(source + ": term \"" + term + "\": non-numeric component");
      e.vector.push_back(v.get<double>());
    }
    if (declared && e.vector.size() != *declared)
      throw InputError(source + ": term \"" + term + "\": dimension mismatch (expected " + std::to_string(*declared) +
                       ", got " + std::to_string(e.vector.size()) + ")");
    entries.push_back(std::move(e));
  }
  return EmbeddingStore::build(std::move(entries), source);
}

}  // namespace detail

inline EmbeddingStore load_store(std::string_view content, StoreFormat format, std::string_view source = "<memory>") {
  const std::string src(source);
  return format == StoreFormat::json ? detail::parse_json_store(content, src) : detail::parse_tsv_store(content, src);
}

/// Format is chosen from the extension: ".json" is JSON, anything else TSV.
inline EmbeddingStore load_store_file(const std::filesystem::path& path) {
  const auto format = path.extension() == ".json" ? StoreFormat::json : StoreFormat::tsv;
  return load_store(text::read_file(path), format, path.string());
}

inline std::string save_store(const EmbeddingStore& store, StoreFormat format) {
  if (format == StoreFormat::json) {
    nlohmann::ordered_json doc;
    doc["dimension"] = store.dimension();
    auto& terms = doc["terms"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < store.size(); ++i) {
      auto v = store.vector_at(i);
      terms[store.terms()[i]] = std::vector<double>(v.begin(), v.end());
    }
    return doc.dump() + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < store.size(); ++i) {
    out += store.terms()[i];
    for (double v : store.vector_at(i)) {
      out += '\t';
      out += text::format_double(v);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic vocabularies

struct SynthParams {
  std::size_t n_clusters = 1;
  std::size_t terms_per_cluster = 1;
  std::size_t n_noise = 0;
  std::size_t dimension = 64;
  double intra_cluster_similarity = 0.9;
  std::uint64_t seed = 0;
};

struct SynthVocabulary {
  EmbeddingStore store;
  std::vector<std::vector<std::string>> clusters;  // cluster index -> member terms
  std::vector<std::string> noise;
};

inline std::string synth_cluster_term(std::size_t cluster, std::size_t member) {
  return "c" + std::to_string(cluster) + ".t" + std::to_string(member);
}
inline std::string synth_noise_term(std::size_t k) { return "noise." + std::to_string(k); }

namespace detail {

inline std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      n2 += x * x;
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= inv;
  return v;
}

/// Perturbation scale sigma such that normalize(c + sigma*g), g ~ N(0, I), has
/// mean cosine `target` to the unit centroid c. Writing g = z*c + g_perp gives
///   cos = (1 + sigma*z) / sqrt((1 + sigma*z)^2 + sigma^2 * q),  q ~ chi2(D-1),
/// which is decreasing in sigma for every (z, q). The mean is estimated on a
/// fixed common-random-number sample and inverted by bisection.
inline double perturbation_scale(std::size_t dim, double target) {
  constexpr std::size_t kSamples = 20000;
  Rng rng(mix64(0x5eedULL ^ dim));
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi2(static_cast<double>(dim - 1));
  std::vector<std::pair<double, double>> samples(kSamples);
  for (auto& [z, q] : samples) {
    z = normal(rng);
    q = chi2(rng);
  }
  auto mean_cos = [&](double sigma) {
    double acc = 0.0;
    for (const auto& [z, q] : samples) {
      const double a = 1.0 + sigma * z;
      acc += a / std::sqrt(a * a + sigma * sigma * q);
    }
    return acc / static_cast<double>(kSamples);
  };
  double lo = 0.0, hi = 1.0;
  while (mean_cos(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_cos(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Planted-cluster vocabulary: each cluster perturbs a uniformly drawn unit
/// centroid; noise terms are uniform on the sphere. Pure function of params.
inline SynthVocabulary synth_vocabulary(const SynthParams& p) {
  if (p.dimension < 2) throw ParameterError("synth_vocabulary: dimension must be >= 2");
  if (!(p.intra_cluster_similarity > 0.0 && p.intra_cluster_similarity < 1.0))
    throw ParameterError("synth_vocabulary: intra_cluster_similarity must lie in (0, 1)");
  if (p.n_clusters * p.terms_per_cluster + p.n_noise < 1)
    throw ParameterError("synth_vocabulary: vocabulary would be empty");

  const double sigma = detail::perturbation_scale(p.dimension, p.intra_cluster_similarity);
  Rng rng(p.seed);
  std::normal_distribution<double> normal;
  SynthVocabulary out;
  std::vector<EmbeddingStore::RawEntry> entries;
  entries.reserve(p.n_clusters * p.terms_per_cluster + p.n_noise);
  out.clusters.resize(p.n_clusters);
  for (std::size_t c = 0; c < p.n_clusters; ++c) {
    const auto centroid = detail::random_unit(rng, p.dimension);
    for (std::size_t m = 0; m < p.terms_per_cluster; ++m) {
      std::vector<double> v(centroid);
      for (auto& x : v) x += sigma * normal(rng);
      auto id = synth_cluster_term(c, m);
      out.clusters[c].push_back(id);
      entries.push_back({std::move(id), std::move(v), 0});
    }
  }
  for (std::size_t k = 0; k < p.n_noise; ++k) {
    auto id = synth_noise_term(k);
    out.noise.push_back(id);
    entries.push_back({std::move(id), detail::random_unit(rng, p.dimension), 0});
  }
  out.store = EmbeddingStore::build(std::move(entries), "<synthetic>");
  return out;
}

}  // namespace prosel
