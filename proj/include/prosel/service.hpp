#pragma once

// Transport-independent request handling for the HTTP facade.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "prosel/error.hpp"
#include "prosel/pipeline.hpp"
#include "prosel/report.hpp"
#include "prosel/version.hpp"

namespace prosel::service {

struct Response {
  int status = 200;
  std::string body;
};

using json = nlohmann::ordered_json;

inline Response json_response(int status, const json& body) { return {status, body.dump() + "\n"}; }

inline Response error_response(int status, const std::string& message, std::vector<std::string> unresolved = {}) {
  json body{{"error", message}};
  if (!unresolved.empty()) body["unresolved_terms"] = unresolved;
  return json_response(status, body);
}

namespace detail {

struct BadRequest {
  std::string message;
};

inline void reject_unknown_fields(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw BadRequest{where + " must be an object"};
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw BadRequest{"unknown field '" + key + "' in " + where};
  }
}

inline double number_field(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw BadRequest{std::string("params.") + key + " must be a number"};
  return obj[key].get<double>();
}

inline HistoricalProfile parse_profile(const json& body) {
  if (!body.contains("profile") || !body["profile"].is_array() || body["profile"].empty())
    throw BadRequest{"'profile' must be a non-empty array"};
  std::vector<ProfileEntry> entries;
  for (const auto& e : body["profile"]) {
    reject_unknown_fields(e, {"term", "weight"}, "profile entry");
    if (!e.contains("term") || !e["term"].is_string()) throw BadRequest{"profile entry needs a string 'term'"};
    ProfileEntry pe{e["term"].get<std::string>(), 1.0};
    if (e.contains("weight") && !e["weight"].is_null()) {
      if (!e["weight"].is_number()) throw BadRequest{"profile weight must be a number"};
      pe.weight = e["weight"].get<double>();
    }
    entries.push_back(std::move(pe));
  }
  try {
    return HistoricalProfile(entries);
  } catch (const InputError& e) {
    throw BadRequest{e.what()};
  }
}

inline std::vector<CandidateItem> parse_candidates(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw BadRequest{"'candidates' must be a non-empty array"};
  std::vector<CandidateItem> items;
  for (const auto& c : arr) {
    reject_unknown_fields(c, {"item_id", "category", "terms"}, "candidate");
    if (!c.contains("item_id") || !c["item_id"].is_string()) throw BadRequest{"candidate needs a string 'item_id'"};
    if (!c.contains("terms") || !c["terms"].is_array()) throw BadRequest{"candidate needs a 'terms' array"};
    CandidateItem item{text::trim(c["item_id"].get<std::string>()), {}, {}};
    if (c.contains("category")) {
      if (!c["category"].is_string()) throw BadRequest{"candidate 'category' must be a string"};
      item.category = c["category"].get<std::string>();
    }
    for (const auto& t : c["terms"]) {
      if (!t.is_string()) throw BadRequest{"candidate terms must be strings"};
      item.mapped_terms.push_back(text::trim(t.get<std::string>()));
    }
    items.push_back(std::move(item));
  }
  try {
    validate_candidates(items);
  } catch (const InputError& e) {
    throw BadRequest{e.what()};
  }
  return items;
}

}  // namespace detail

/// Everything loaded at boot: the store and the default candidate set.
struct Model {
  std::shared_ptr<const CandidateSpace> default_space;
};

/// Stateless request handlers over an immutable model. The model is
/// published once loading finishes; until then health reports 503.
class SelectService {
 public:
  SelectService() = default;
  explicit SelectService(std::shared_ptr<const Model> model) { publish(std::move(model)); }

  void publish(std::shared_ptr<const Model> model) {
    std::lock_guard lock(mutex_);
    model_ = std::move(model);
  }

  std::shared_ptr<const Model> model() const {
    std::lock_guard lock(mutex_);
    return model_;
  }

  Response health() const {
    const auto m = model();
    if (!m) return error_response(503, "loading");
    const auto& space = *m->default_space;
    return json_response(200, json{{"status", "ok"},
                                   {"dimension", space.store().dimension()},
                                   {"vocabulary_size", space.store().size()},
                                   {"candidate_count", space.items().size()},
                                   {"version", kVersion}});
  }

  Response select(const std::string& body_text) const {
    const auto m = model();
    if (!m) return error_response(503, "loading");
    try {
      return select_impl(*m, body_text);
    } catch (const detail::BadRequest& e) {
      return error_response(400, e.message);
    } catch (const UnresolvedTermsError& e) {
      return error_response(400, "unresolved terms", e.terms());
    } catch (const InputError& e) {
      return error_response(400, e.what());
    } catch (const ParameterError& e) {
      return error_response(422, e.what());
    } catch (...) {
      const auto id = next_request_id_.fetch_add(1) + 1;
      return json_response(500, json{{"error", "internal error"}, {"request_id", id}});
    }
  }

 private:
  static Response select_impl(const Model& m, const std::string& body_text) {
    json body;
    try {
      body = json::parse(body_text);
    } catch (const json::parse_error&) {
      throw detail::BadRequest{"malformed JSON body"};
    }
    detail::reject_unknown_fields(body, {"profile", "candidates", "params"}, "request");
    const auto profile = detail::parse_profile(body);

    SelectionParams params;
    if (body.contains("params")) {
      const auto& p = body["params"];
      detail::reject_unknown_fields(p, {"info", "k", "x0", "beta", "alpha", "select_n"}, "params");
      params.info = detail::number_field(p, "info", params.info);
      params.utility.k = detail::number_field(p, "k", params.utility.k);
      params.utility.x0 = detail::number_field(p, "x0", params.utility.x0);
      params.utility.beta = detail::number_field(p, "beta", params.utility.beta);
      params.alpha = detail::number_field(p, "alpha", params.alpha);
      if (p.contains("select_n")) {
        if (!p["select_n"].is_number_unsigned()) throw ParameterError("params.select_n must be a nonnegative integer");
        params.select_n = p["select_n"].get<std::size_t>();
      }
    }
    params.validate();

    // Every unresolved term, from the profile and any candidate override, is reported at once.
    auto needed = profile.terms();
    std::shared_ptr<const CandidateSpace> space = m.default_space;
    if (body.contains("candidates")) {
      auto items = detail::parse_candidates(body["candidates"]);
      for (const auto& item : items) needed.insert(needed.end(), item.mapped_terms.begin(), item.mapped_terms.end());
      m.default_space->store().require_all(needed);
      space = std::make_shared<const CandidateSpace>(m.default_space->store_ptr(), std::move(items));
    } else {
      space->store().require_all(needed);
    }
    const auto result = run_selection(*space, profile, params);
    return json_response(200, to_json(result));
  }

  mutable std::mutex mutex_;
  std::shared_ptr<const Model> model_;
  mutable std::atomic<std::uint64_t> next_request_id_{0};
};

}  // namespace prosel::service
