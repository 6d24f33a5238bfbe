#pragma once

// Selection report rendering (CSV, JSON, aligned text) and JSON read-back.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "prosel/error.hpp"
#include "prosel/spectral.hpp"
#include "prosel/text.hpp"

namespace prosel {

enum class ReportFormat { csv, json, table };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "table") return ReportFormat::table;
  throw ParameterError("unknown report format '" + std::string(s) + "' (expected csv, json or table)");
}

/// Incidence counts print as integers when they are integral.
inline std::string format_count(double w) {
  if (std::floor(w) == w && std::abs(w) < 1e15) return std::to_string(static_cast<long long>(w));
  return text::format_double(w);
}

/// "term [count]" entries joined by ';'.
inline std::string related_terms_field(const std::vector<Evidence>& evidence) {
  std::string out;
  for (const auto& e : evidence) {
    if (!out.empty()) out += ';';
    out += e.term + " [" + format_count(e.weight) + "]";
  }
  return out;
}

inline std::string to_csv(const SelectionResult& r) {
  std::string out = "rank,item_id,relevance,weight,utility,leverage,selected,related_terms\n";
  for (const auto& c : r.ranked) {
    out += std::to_string(c.rank) + ',' + text::csv_escape(c.item_id) + ',' + text::format_double(c.relevance) + ',' +
           text::format_double(c.weight) + ',' + text::format_double(c.utility) + ',' + text::format_double(c.leverage) +
           ',' + (c.selected ? "true" : "false") + ',' + text::csv_escape(related_terms_field(c.evidence)) + '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const SelectionResult& r) {
  nlohmann::ordered_json doc;
  doc["k_optimal"] = r.k_optimal;
  doc["n_selected"] = r.n_selected;
  doc["info"] = r.info;
  doc["eigenvalues"] = r.eigenvalues;
  doc["explained_curve"] = r.explained_curve;
  auto& items = doc["items"] = nlohmann::ordered_json::array();
  for (const auto& c : r.ranked) {
    nlohmann::ordered_json item;
    item["rank"] = c.rank;
    item["item_id"] = c.item_id;
    item["category"] = c.category;
    item["relevance"] = c.relevance;
    item["weight"] = c.weight;
    item["utility"] = c.utility;
    item["leverage"] = c.leverage;
    item["selected"] = c.selected;
    auto& rel = item["related_terms"] = nlohmann::ordered_json::array();
    for (const auto& e : c.evidence) rel.push_back({{"term", e.term}, {"similarity", e.similarity}, {"weight", e.weight}});
    items.push_back(std::move(item));
  }
  return doc;
}

inline SelectionResult selection_from_json(const nlohmann::ordered_json& doc) {
  try {
    SelectionResult r;
    r.k_optimal = doc.at("k_optimal").get<std::size_t>();
    r.n_selected = doc.at("n_selected").get<std::size_t>();
    r.info = doc.at("info").get<double>();
    r.eigenvalues = doc.at("eigenvalues").get<Vector>();
    r.explained_curve = doc.at("explained_curve").get<Vector>();
    for (const auto& item : doc.at("items")) {
      ScoredCandidate c;
      c.rank = item.at("rank").get<std::size_t>();
      c.item_id = item.at("item_id").get<std::string>();
      c.category = item.value("category", "");
      c.relevance = item.at("relevance").get<double>();
      c.weight = item.at("weight").get<double>();
      c.utility = item.at("utility").get<double>();
      c.leverage = item.at("leverage").get<double>();
      c.selected = item.at("selected").get<bool>();
      for (const auto& e : item.at("related_terms"))
        c.evidence.push_back({e.at("term").get<std::string>(), e.at("similarity").get<double>(), e.at("weight").get<double>()});
      r.ranked.push_back(std::move(c));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed selection report: ") + e.what());
  }
}

/// Fixed-width table with three decimals, selected rows marked with '*'.
inline std::string to_table(const SelectionResult& r) {
  std::size_t id_width = 12;
  for (const auto& c : r.ranked) id_width = std::max(id_width, c.item_id.size());
  auto pad = [](std::string s, std::size_t w, bool left) {
    if (s.size() >= w) return s;
    return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
  };
  std::string out;
  out += "k_optimal = " + std::to_string(r.k_optimal) + " (info = " + text::format_fixed(r.info, 3) + ")\n";
  out += pad("Rank", 5, false) + "  " + pad("PRO item", id_width, true) + "  " + pad("Relevance", 9, false) + "  " +
         pad("Weight", 6, false) + "  " + pad("Utility", 7, false) + "  " + pad("Leverage", 8, false) + "  Sel  " +
         "Most relevant terms [count]\n";
  for (const auto& c : r.ranked) {
    out += pad(std::to_string(c.rank), 5, false) + "  " + pad(c.item_id, id_width, true) + "  " +
           pad(text::format_fixed(c.relevance, 3), 9, false) + "  " + pad(text::format_fixed(c.weight, 3), 6, false) + "  " +
           pad(text::format_fixed(c.utility, 3), 7, false) + "  " + pad(text::format_fixed(c.leverage, 3), 8, false) +
           (c.selected ? "   * " : "     ") + " " + related_terms_field(c.evidence) + "\n";
  }
  return out;
}

inline std::string render(const SelectionResult& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return to_csv(r);
    case ReportFormat::json: return to_json(r).dump(2) + "\n";
    case ReportFormat::table: return to_table(r);
  }
  return {};
}

}  // namespace prosel
