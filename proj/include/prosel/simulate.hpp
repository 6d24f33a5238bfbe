#pragma once

// Monte Carlo recovery harness: planted ground-truth symptoms, noisy
// historical profiles, confusion counts and summary statistics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "prosel/error.hpp"
#include "prosel/pipeline.hpp"
#include "prosel/rng.hpp"
#include "prosel/termspace.hpp"
#include "prosel/text.hpp"

namespace prosel {

struct IntRange {
  long min = 0;
  long max = 0;

  bool within(long lo, long hi) const { return min >= lo && max <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// "lo-hi" or a single integer "n" (meaning n-n).
inline IntRange parse_range(std::string_view s) {
  s = text::trim_view(s);
  const auto dash = s.find('-', 1);
  if (dash == std::string_view::npos) {
    auto v = text::parse_int(s);
    if (!v) throw ParameterError("invalid range '" + std::string(s) + "'");
    return {*v, *v};
  }
  auto lo = text::parse_int(s.substr(0, dash));
  auto hi = text::parse_int(s.substr(dash + 1));
  if (!lo || !hi) throw ParameterError("invalid range '" + std::string(s) + "'");
  return {*lo, *hi};
}

inline std::string format_range(const IntRange& r) {
  return r.min == r.max ? std::to_string(r.min) : std::to_string(r.min) + "-" + std::to_string(r.max);
}

struct SimulationConfig {
  IntRange n_symptoms{5, 40};
  IntRange aes_per_symptom{1, 3};
  IntRange n_noise{10, 50};
  IntRange incidence{1, 10};  // per-term weight distribution (uniform integers)
  double info = 0.975;
  std::size_t n_runs = 1000;
  std::uint64_t master_seed = 0;
  std::size_t dimension = 256;
  double intra_cluster_similarity = 0.99;
  std::size_t n_candidates = 80;
  std::size_t terms_per_cluster = 8;
  std::size_t noise_pool = 2000;
  std::size_t duplicate_pairs = 0;  // extra candidates sharing a cluster with an existing one
  double alpha = 0.9;
  UtilityParams utility;
  bool allow_wide_ranges = false;

  std::size_t candidate_count() const { return n_candidates + duplicate_pairs; }

  SelectionParams selection_params() const {
    SelectionParams p;
    p.info = info;
    p.alpha = alpha;
    p.utility = utility;
    return p;
  }

  /// Throws on unusable settings. Ranges outside the reference design
  /// (symptoms 5-40, terms per symptom 1-3, noise 10-50) are errors unless
  /// allow_wide_ranges is set, in which case they are returned as warnings.
  /// `single_symptom` skips the n_symptoms checks.
  std::vector<std::string> validate(bool single_symptom = false) const {
    std::vector<std::string> warnings;
    auto check_range = [&](const char* name, const IntRange& r, long floor, long lo, long hi) {
      if (r.min > r.max) throw ParameterError(std::string(name) + ": min exceeds max");
      if (r.min < floor) throw ParameterError(std::string(name) + ": must be >= " + std::to_string(floor));
      if (!r.within(lo, hi)) {
        const auto msg = std::string(name) + " range " + format_range(r) + " lies outside the reference design " +
                         std::to_string(lo) + "-" + std::to_string(hi);
        if (!allow_wide_ranges) throw ParameterError(msg + " (pass allow_wide_ranges to permit)");
        warnings.push_back(msg);
      }
    };
    if (!single_symptom) check_range("n_symptoms", n_symptoms, 1, 5, 40);
    check_range("aes_per_symptom", aes_per_symptom, 1, 1, 3);
    check_range("n_noise", n_noise, 0, 10, 50);
    if (incidence.min < 1 || incidence.min > incidence.max) throw ParameterError("incidence: need 1 <= min <= max");
    validate_info(info);
    if (n_runs < 1) throw ParameterError("n_runs must be positive");
    if (dimension < 2) throw ParameterError("dimension must be >= 2");
    if (!(intra_cluster_similarity > 0.0 && intra_cluster_similarity < 1.0))
      throw ParameterError("intra_cluster_similarity must lie in (0, 1)");
    if (n_candidates < 1) throw ParameterError("n_candidates must be positive");
    if (duplicate_pairs > n_candidates) throw ParameterError("duplicate_pairs exceeds n_candidates");
    if (static_cast<std::size_t>(aes_per_symptom.max) > terms_per_cluster)
      throw ParameterError("aes_per_symptom max exceeds terms_per_cluster");
    if (duplicate_pairs > 0 && terms_per_cluster < 2) throw ParameterError("duplicate_pairs needs terms_per_cluster >= 2");
    if (!single_symptom && static_cast<std::size_t>(n_symptoms.max) > candidate_count())
      throw ParameterError("n_symptoms max exceeds the candidate count");
    if (static_cast<std::size_t>(n_noise.max) > noise_pool) throw ParameterError("n_noise max exceeds noise_pool");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
    utility.validate();
    return warnings;
  }
};

/// Flat `key = value` configuration; '#' starts a comment line.
/// Keys present in the file are appended to `keys_seen` when it is given.
inline SimulationConfig parse_simulation_config(std::string_view content, SimulationConfig base = {},
                                                std::string_view source = "<memory>",
                                                std::vector<std::string>* keys_seen = nullptr) {
  const std::string src(source);
  std::size_t line_no = 0;
  for (auto line : text::lines(content)) {
    ++line_no;
    auto t = text::trim_view(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw InputError(src, line_no, "expected key = value");
    const auto key = text::trim(t.substr(0, eq));
    const auto val = text::trim(t.substr(eq + 1));
    if (keys_seen) keys_seen->push_back(key);
    auto as_double = [&] {
      auto v = text::parse_double(val);
      if (!v) throw InputError(src, line_no, key + ": expected a number, got '" + val + "'");
      return *v;
    };
    auto as_size = [&] {
      auto v = text::parse_int(val);
      if (!v || *v < 0) throw InputError(src, line_no, key + ": expected a nonnegative integer, got '" + val + "'");
      return static_cast<std::size_t>(*v);
    };
    auto as_range = [&] {
      try {
        return parse_range(val);
      } catch (const ParameterError& e) {
        throw InputError(src, line_no, key + ": " + e.what());
      }
    };
    if (key == "n_symptoms") base.n_symptoms = as_range();
    else if (key == "aes_per_symptom") base.aes_per_symptom = as_range();
    else if (key == "n_noise") base.n_noise = as_range();
    else if (key == "incidence") base.incidence = as_range();
    else if (key == "info") base.info = as_double();
    else if (key == "runs" || key == "n_runs") base.n_runs = as_size();
    else if (key == "seed" || key == "master_seed") base.master_seed = as_size();
    else if (key == "dimension") base.dimension = as_size();
    else if (key == "intra_cluster_similarity") base.intra_cluster_similarity = as_double();
    else if (key == "n_candidates") base.n_candidates = as_size();
    else if (key == "terms_per_cluster") base.terms_per_cluster = as_size();
    else if (key == "noise_pool") base.noise_pool = as_size();
    else if (key == "duplicate_pairs") base.duplicate_pairs = as_size();
    else if (key == "alpha") base.alpha = as_double();
    else if (key == "k") base.utility.k = as_double();
    else if (key == "x0") base.utility.x0 = as_double();
    else if (key == "beta") base.utility.beta = as_double();
    else if (key == "allow_wide_ranges") base.allow_wide_ranges = (val == "true" || val == "1");
    else throw InputError(src, line_no, "unknown key '" + key + "'");
  }
  return base;
}

// ---------------------------------------------------------------------------
// Seeds

inline constexpr std::uint64_t kVocabularyStream = 1;
inline constexpr std::uint64_t kRunStream = 2;
inline constexpr std::uint64_t kTpirStream = 3;

inline std::uint64_t vocabulary_seed(std::uint64_t master) { return derive_seed(master, {kVocabularyStream}); }
inline std::uint64_t run_seed(std::uint64_t master, std::uint64_t run) { return derive_seed(master, {kRunStream, run}); }
inline std::uint64_t tpir_seed(std::uint64_t master, std::uint64_t item, std::uint64_t rep) {
  return derive_seed(master, {kTpirStream, item, rep});
}

// ---------------------------------------------------------------------------
// Universe and trials

inline std::string synth_item_id(std::size_t cluster, bool twin = false) {
  return "symptom." + std::to_string(cluster) + (twin ? ".twin" : "");
}

/// Synthetic vocabulary plus the candidate set built on top of it. Candidate
/// c < n_candidates maps to the first term of cluster c; the twin of cluster
/// c < duplicate_pairs maps to the second term of the same cluster.
struct SimulationUniverse {
  SynthVocabulary vocabulary;
  std::unique_ptr<CandidateSpace> space;
  std::vector<std::size_t> item_cluster;  // candidate index -> cluster index
};

inline SimulationUniverse build_universe(const SimulationConfig& config) {
  SimulationUniverse u;
  SynthParams sp;
  sp.n_clusters = config.n_candidates;
  sp.terms_per_cluster = config.terms_per_cluster;
  sp.n_noise = config.noise_pool;
  sp.dimension = config.dimension;
  sp.intra_cluster_similarity = config.intra_cluster_similarity;
  sp.seed = vocabulary_seed(config.master_seed);
  u.vocabulary = synth_vocabulary(sp);

  std::vector<CandidateItem> items;
  for (std::size_t c = 0; c < config.n_candidates; ++c) {
    items.push_back({synth_item_id(c), "synthetic", {u.vocabulary.clusters[c][0]}});
    u.item_cluster.push_back(c);
  }
  for (std::size_t c = 0; c < config.duplicate_pairs; ++c) {
    items.push_back({synth_item_id(c, true), "synthetic", {u.vocabulary.clusters[c][1]}});
    u.item_cluster.push_back(c);
  }
  u.space = std::make_unique<CandidateSpace>(std::make_shared<const EmbeddingStore>(u.vocabulary.store), std::move(items));
  return u;
}

struct Trial {
  HistoricalProfile profile;
  std::vector<std::string> truth;  // planted item ids, sorted
  std::vector<std::string> noise_terms;
};

namespace detail {

/// First k entries of a partial Fisher-Yates shuffle of 0..n-1.
inline std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, static_cast<long>(i), static_cast<long>(n - 1)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

inline Trial make_trial(const SimulationUniverse& u, const SimulationConfig& config, Rng& rng,
                        const std::vector<std::size_t>& planted) {
  std::vector<ProfileEntry> entries;
  std::vector<std::string> truth;
  for (std::size_t item : planted) {
    truth.push_back(u.space->items()[item].item_id);
    const auto& members = u.vocabulary.clusters[u.item_cluster[item]];
    const auto n_aes = static_cast<std::size_t>(uniform_int(rng, config.aes_per_symptom.min, config.aes_per_symptom.max));
    for (std::size_t m : sample_indices(rng, members.size(), n_aes))
      entries.push_back({members[m], static_cast<double>(uniform_int(rng, config.incidence.min, config.incidence.max))});
  }
  const auto n_noise = static_cast<std::size_t>(uniform_int(rng, config.n_noise.min, config.n_noise.max));
  std::vector<std::string> noise_terms;
  for (std::size_t k : sample_indices(rng, u.vocabulary.noise.size(), n_noise)) {
    noise_terms.push_back(u.vocabulary.noise[k]);
    entries.push_back({u.vocabulary.noise[k], static_cast<double>(uniform_int(rng, config.incidence.min, config.incidence.max))});
  }
  std::sort(truth.begin(), truth.end());
  return {HistoricalProfile(entries), std::move(truth), std::move(noise_terms)};
}

}  // namespace detail

/// Plants n_symptoms candidates (uniform, without replacement), draws their
/// terms from the matching clusters and mixes in noise terms.
inline Trial generate_trial(const SimulationUniverse& u, const SimulationConfig& config, std::uint64_t seed) {
  const std::size_t n_items = u.space->items().size();
  Rng rng(seed);
  const auto n_symptoms = static_cast<std::size_t>(uniform_int(rng, config.n_symptoms.min, config.n_symptoms.max));
  if (n_symptoms > n_items) throw ParameterError("n_symptoms exceeds the candidate count");
  return detail::make_trial(u, config, rng, detail::sample_indices(rng, n_items, n_symptoms));
}

/// One planted candidate (by index), used for per-item recovery rates.
inline Trial generate_single_symptom_trial(const SimulationUniverse& u, const SimulationConfig& config, std::size_t item,
                                           std::uint64_t seed) {
  if (item >= u.space->items().size()) throw ParameterError("planted item index out of range");
  Rng rng(seed);
  return detail::make_trial(u, config, rng, {item});
}

// ---------------------------------------------------------------------------
// Scoring and aggregation

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Empty denominators yield 0 (an empty selection has precision 0).
inline ConfusionCounts score_run(const std::vector<std::string>& selected, const std::vector<std::string>& truth) {
  const std::unordered_set<std::string> sel(selected.begin(), selected.end());
  const std::unordered_set<std::string> tru(truth.begin(), truth.end());
  ConfusionCounts c;
  for (const auto& s : sel) (tru.count(s) ? c.tp : c.fp)++;
  for (const auto& t : tru)
    if (!sel.count(t)) ++c.fn;
  auto ratio = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  c.precision = ratio(c.tp, c.tp + c.fp);
  c.recall = ratio(c.tp, c.tp + c.fn);
  c.f1 = c.precision + c.recall > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
  return c;
}

struct SummaryStats {
  double mean = 0.0, std = 0.0, min = 0.0, median = 0.0, max = 0.0;
};

/// Sample standard deviation (n - 1); zero for a single value.
inline SummaryStats summarize(std::vector<double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

struct RunRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t size_simulated = 0;
  std::size_t k_optimal = 0;
  ConfusionCounts counts;
};

struct SimulationSummary {
  SummaryStats size_simulated, recall, precision, f1;
};

inline SimulationSummary summarize_runs(const std::vector<RunRecord>& runs) {
  std::vector<double> size, recall, precision, f1;
  for (const auto& r : runs) {
    size.push_back(static_cast<double>(r.size_simulated));
    recall.push_back(r.counts.recall);
    precision.push_back(r.counts.precision);
    f1.push_back(r.counts.f1);
  }
  return {summarize(size), summarize(recall), summarize(precision), summarize(f1)};
}

struct SimulationReport {
  SimulationConfig config;
  std::vector<std::string> warnings;
  std::vector<RunRecord> runs;  // sorted by index
  SimulationSummary summary;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// (lowest index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline RunRecord simulate_run(const SimulationUniverse& u, const SimulationConfig& config, std::size_t index) {
  RunRecord rec;
  rec.index = index;
  rec.seed = run_seed(config.master_seed, index);
  const auto trial = generate_trial(u, config, rec.seed);
  const auto result = run_selection(*u.space, trial.profile, config.selection_params());
  rec.size_simulated = trial.truth.size();
  rec.k_optimal = result.k_optimal;
  rec.counts = score_run(result.selected_ids(), trial.truth);
  return rec;
}

inline SimulationReport run_monte_carlo(const SimulationConfig& config, std::size_t threads = 1) {
  SimulationReport report;
  report.config = config;
  report.warnings = config.validate();
  const auto universe = build_universe(config);
  report.runs.resize(config.n_runs);
  parallel_for(config.n_runs, threads, [&](std::size_t i) { report.runs[i] = simulate_run(universe, config, i); });
  report.summary = summarize_runs(report.runs);
  return report;
}

// ---------------------------------------------------------------------------
// Per-item recovery

struct TpirRow {
  std::string item_id;
  std::size_t reps = 0;
  std::size_t hits = 0;
  double tpir = 0.0;
};

/// For every candidate, plants it alone `n_reps` times and records how often
/// it is selected. Uses config.info as the variance threshold.
inline std::vector<TpirRow> per_symptom_tpir(const SimulationUniverse& u, const SimulationConfig& config, std::size_t n_reps,
                                             std::size_t threads = 1) {
  if (n_reps == 0) throw ParameterError("per_symptom_tpir: n_reps must be positive");
  const auto& items = u.space->items();
  const auto params = config.selection_params();
  std::vector<TpirRow> rows(items.size());
  for (std::size_t j = 0; j < items.size(); ++j) rows[j] = {items[j].item_id, n_reps, 0, 0.0};
  std::vector<unsigned char> hit(items.size() * n_reps, 0);
  parallel_for(items.size() * n_reps, threads, [&](std::size_t task) {
    const std::size_t item = task / n_reps, rep = task % n_reps;
    const auto trial = generate_single_symptom_trial(u, config, item, tpir_seed(config.master_seed, item, rep));
    const auto result = run_selection(*u.space, trial.profile, params);
    for (const auto& c : result.ranked)
      if (c.selected && c.item_id == items[item].item_id) hit[task] = 1;
  });
  for (std::size_t j = 0; j < items.size(); ++j) {
    for (std::size_t r = 0; r < n_reps; ++r) rows[j].hits += hit[j * n_reps + r];
    rows[j].tpir = static_cast<double>(rows[j].hits) / static_cast<double>(n_reps);
  }
  return rows;
}

struct SimilarityTpirRow {
  std::string item_id;
  std::optional<double> max_similarity;  // empty for a single candidate
  double tpir = 0.0;
};

/// Joins each item's largest off-diagonal similarity with its recovery rate.
inline std::vector<SimilarityTpirRow> similarity_vs_tpir(const Matrix& similarity, const std::vector<TpirRow>& tpir) {
  if (similarity.rows() != tpir.size() || similarity.cols() != tpir.size())
    throw ParameterError("similarity_vs_tpir: dimension mismatch");
  std::vector<SimilarityTpirRow> rows;
  for (std::size_t j = 0; j < tpir.size(); ++j) {
    SimilarityTpirRow row{tpir[j].item_id, std::nullopt, tpir[j].tpir};
    for (std::size_t i = 0; i < tpir.size(); ++i)
      if (i != j) row.max_similarity = std::max(row.max_similarity.value_or(-2.0), similarity(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string similarity_tpir_csv(const std::vector<SimilarityTpirRow>& rows) {
  std::string out = "item_id,max_similarity,tpir\n";
  for (const auto& r : rows)
    out += text::csv_escape(r.item_id) + ',' + (r.max_similarity ? text::format_double(*r.max_similarity) : "") + ',' +
           text::format_double(r.tpir) + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Report rendering

inline nlohmann::ordered_json config_to_json(const SimulationConfig& c) {
  nlohmann::ordered_json j;
  j["n_symptoms"] = format_range(c.n_symptoms);
  j["aes_per_symptom"] = format_range(c.aes_per_symptom);
  j["n_noise"] = format_range(c.n_noise);
  j["incidence"] = format_range(c.incidence);
  j["info"] = c.info;
  j["n_runs"] = c.n_runs;
  j["master_seed"] = c.master_seed;
  j["dimension"] = c.dimension;
  j["intra_cluster_similarity"] = c.intra_cluster_similarity;
  j["n_candidates"] = c.n_candidates;
  j["terms_per_cluster"] = c.terms_per_cluster;
  j["noise_pool"] = c.noise_pool;
  j["duplicate_pairs"] = c.duplicate_pairs;
  j["alpha"] = c.alpha;
  j["k"] = c.utility.k;
  j["x0"] = c.utility.x0;
  j["beta"] = c.utility.beta;
  return j;
}

inline nlohmann::ordered_json stats_to_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"median", s.median}, {"max", s.max}};
}

inline nlohmann::ordered_json to_json(const SimulationReport& r) {
  nlohmann::ordered_json doc;
  doc["config"] = config_to_json(r.config);
  doc["seed_derivation"] = "run_seed(i) = derive_seed(master_seed, [2, i]) with SplitMix64 mixing";
  doc["empty_selection_precision"] = 0.0;
  doc["warnings"] = r.warnings;
  doc["summary"] = {{"size_simulated", stats_to_json(r.summary.size_simulated)},
                    {"recall", stats_to_json(r.summary.recall)},
                    {"precision", stats_to_json(r.summary.precision)},
                    {"f1", stats_to_json(r.summary.f1)}};
  auto& runs = doc["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"index", run.index},
                    {"seed", run.seed},
                    {"size_simulated", run.size_simulated},
                    {"k_optimal", run.k_optimal},
                    {"tp", run.counts.tp},
                    {"fp", run.counts.fp},
                    {"fn", run.counts.fn},
                    {"precision", run.counts.precision},
                    {"recall", run.counts.recall},
                    {"f1", run.counts.f1}});
  }
  return doc;
}

/// Summary in the Mean/Std/Min/Median/Max x Size/Recall/Precision/F1 layout.
inline std::string to_table(const SimulationSummary& s) {
  auto cell = [](double v, std::size_t width) {
    auto str = text::format_fixed(v, 2);
    return std::string(width > str.size() ? width - str.size() : 0, ' ') + str;
  };
  std::string out = "        Size Simulated  Recall  Precision      F1\n";
  auto row = [&](const char* name, auto pick) {
    std::string line = name;
    line.resize(8, ' ');
    out += line + cell(pick(s.size_simulated), 14) + cell(pick(s.recall), 8) + cell(pick(s.precision), 11) +
           cell(pick(s.f1), 8) + "\n";
  };
  row("Mean", [](const SummaryStats& x) { return x.mean; });
  row("Std", [](const SummaryStats& x) { return x.std; });
  row("Min", [](const SummaryStats& x) { return x.min; });
  row("Median", [](const SummaryStats& x) { return x.median; });
  row("Max", [](const SummaryStats& x) { return x.max; });
  return out;
}

}  // namespace prosel
