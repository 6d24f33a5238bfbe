#pragma once

// Subcommand implementations for the `prosel` command-line tool. Kept apart
// from argument parsing so tests can drive them directly.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "prosel/pipeline.hpp"
#include "prosel/report.hpp"
#include "prosel/simulate.hpp"
#include "prosel/termspace.hpp"
#include "prosel/text.hpp"

namespace prosel::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputeFailure = 1;
inline constexpr int kExitInputFailure = 2;

/// Maps exceptions to exit codes: 2 for invalid input or parameters, 1 otherwise.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputFailure;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputeFailure;
  }
}

inline void emit(const std::optional<fs::path>& out_path, const std::string& content, std::ostream& out) {
  if (out_path) text::write_file_atomic(*out_path, content);
  else out << content;
}

inline std::string read_input(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw InputError(std::string(what) + " file not found: " + path.string());
  return text::read_file(path);
}

struct SelectOptions {
  fs::path embeddings;
  fs::path candidates;
  fs::path profile;
  SelectionParams params;
  std::optional<fs::path> out;
  ReportFormat format = ReportFormat::csv;
};

inline int cmd_select(const SelectOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    o.params.validate();
    // Validate every input before computing anything.
    const auto store_text = read_input(o.embeddings, "embeddings");
    const auto candidates_text = read_input(o.candidates, "candidates");
    const auto profile_text = read_input(o.profile, "profile");
    const auto store_format = o.embeddings.extension() == ".json" ? StoreFormat::json : StoreFormat::tsv;
    auto store = std::make_shared<const EmbeddingStore>(load_store(store_text, store_format, o.embeddings.string()));
    auto items = parse_candidates_csv(candidates_text, o.candidates.string());
    const auto profile = parse_profile_csv(profile_text, o.profile.string());
    {
      auto needed = profile.terms();
      for (const auto& item : items) needed.insert(needed.end(), item.mapped_terms.begin(), item.mapped_terms.end());
      store->require_all(needed);
    }
    const CandidateSpace space(store, std::move(items));
    const auto result = run_selection(space, profile, o.params);

    err << "k_optimal = " << result.k_optimal << " of " << result.ranked.size() << " candidates (info = "
        << text::format_fixed(result.info, 3) << ", explained = "
        << text::format_fixed(result.explained_curve[result.k_optimal - 1], 4) << ")\n";
    emit(o.out, render(result, o.format), out);
    return kExitOk;
  });
}

struct SimulateOptions {
  SimulationConfig config;
  bool info_given = false;
  std::size_t threads = 1;
  std::optional<fs::path> out;
  ReportFormat format = ReportFormat::json;  // json or table
};

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!o.info_given) throw ParameterError("simulate requires an explicit --info threshold (reference value 0.975)");
    if (o.format == ReportFormat::csv) throw ParameterError("simulate supports --format json or table");
    const auto report = run_monte_carlo(o.config, o.threads);
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    err << to_table(report.summary);
    emit(o.out, o.format == ReportFormat::json ? to_json(report).dump(2) + "\n" : to_table(report.summary), out);
    return kExitOk;
  });
}

struct TpirOptions {
  SimulationConfig config;
  std::size_t reps = 100;
  std::size_t threads = 1;
  std::optional<fs::path> out;
  ReportFormat format = ReportFormat::csv;  // csv or json
};

inline int cmd_tpir(const TpirOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.format == ReportFormat::table) throw ParameterError("tpir supports --format csv or json");
    for (const auto& w : o.config.validate(true)) err << "warning: " << w << "\n";
    const auto universe = build_universe(o.config);
    const auto rows = per_symptom_tpir(universe, o.config, o.reps, o.threads);
    const auto table = similarity_vs_tpir(universe.space->similarity(), rows);

    std::vector<double> rates;
    for (const auto& r : rows) rates.push_back(r.tpir);
    const auto stats = summarize(rates);
    err << "median TPIR = " << text::format_fixed(stats.median, 3) << " (range " << text::format_fixed(stats.min, 3) << " - "
        << text::format_fixed(stats.max, 3) << ") over " << rows.size() << " items\n";

    if (o.format == ReportFormat::csv) {
      emit(o.out, similarity_tpir_csv(table), out);
    } else {
      nlohmann::ordered_json doc;
      doc["config"] = config_to_json(o.config);
      doc["reps"] = o.reps;
      auto& arr = doc["items"] = nlohmann::ordered_json::array();
      for (const auto& r : table) {
        nlohmann::ordered_json row{{"item_id", r.item_id}};
        row["max_similarity"] = r.max_similarity ? nlohmann::ordered_json(*r.max_similarity) : nlohmann::ordered_json();
        row["tpir"] = r.tpir;
        arr.push_back(std::move(row));
      }
      emit(o.out, doc.dump(2) + "\n", out);
    }
    return kExitOk;
  });
}

struct ReportOptions {
  fs::path input;
  std::optional<fs::path> out;
  ReportFormat format = ReportFormat::table;
};

/// Re-renders a saved JSON selection report.
inline int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto content = read_input(o.input, "report");
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(o.input.string() + ": malformed JSON: " + e.what());
    }
    emit(o.out, render(selection_from_json(doc), o.format), out);
    return kExitOk;
  });
}

}  // namespace prosel::cli
