#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <future>
#include <thread>

#include "http_routes.hpp"
#include "prosel/service.hpp"
#include "prosel/text.hpp"

using namespace prosel;
using service::SelectService;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PROSEL_FIXTURES;

std::shared_ptr<const service::Model> load_model(const std::string& set) {
  const auto d = kFixtures / set;
  auto store = std::make_shared<const EmbeddingStore>(load_store_file(d / "embeddings.tsv"));
  auto items = parse_candidates_csv(text::read_file(d / "candidates.csv"));
  auto model = std::make_shared<service::Model>();
  model->default_space = std::make_shared<const CandidateSpace>(std::move(store), std::move(items));
  return model;
}

/// Request body carrying the profile CSV of a fixture set.
json profile_request(const std::string& set) {
  const auto profile = parse_profile_csv(text::read_file(kFixtures / set / "profile.csv"));
  json body{{"profile", json::array()}};
  for (const auto& e : profile.entries()) body["profile"].push_back({{"term", e.term}, {"weight", e.weight}});
  return body;
}

}  // namespace

TEST(Service, ExactMatchRequest) {
  const SelectService svc(load_model("toy"));
  const auto r = svc.select(R"({"profile": [{"term": "Chills", "weight": 9}, {"term": "Alopecia"}, {"term": "Cough"}]})");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = json::parse(r.body);
  ASSERT_EQ(doc["items"].size(), 3u);
  for (const auto& item : doc["items"]) EXPECT_NEAR(item["relevance"].get<double>(), 1.0, 1e-9);
  int flagged = 0;
  for (const auto& item : doc["items"]) flagged += item["selected"].get<bool>();
  EXPECT_EQ(flagged, doc["k_optimal"].get<int>());
}

TEST(Service, UnresolvedTermsAreListed) {
  const SelectService svc(load_model("toy"));
  const auto r = svc.select(R"({"profile": [{"term": "Chills"}, {"term": "Vertigo"}],
                                "candidates": [{"item_id": "x", "terms": ["Gout"]}]})");
  EXPECT_EQ(r.status, 400);
  const auto doc = json::parse(r.body);
  EXPECT_EQ(doc["unresolved_terms"], (json{"Vertigo", "Gout"}));
}

TEST(Service, IdenticalRequestsGiveIdenticalBodies) {
  const SelectService svc(load_model("golden"));
  const auto body = profile_request("golden").dump();
  const auto first = svc.select(body);
  ASSERT_EQ(first.status, 200);
  EXPECT_EQ(svc.select(body).body, first.body);

  std::vector<std::future<service::Response>> pending;
  for (int i = 0; i < 8; ++i) pending.push_back(std::async(std::launch::async, [&] { return svc.select(body); }));
  for (auto& f : pending) EXPECT_EQ(f.get().body, first.body);
}

TEST(Service, MalformedAndUnknownFieldsAre400) {
  const SelectService svc(load_model("toy"));
  EXPECT_EQ(svc.select("{not json").status, 400);
  EXPECT_EQ(svc.select(R"({"profile": []})").status, 400);
  EXPECT_EQ(svc.select(R"({"profile": [{"term": "Chills"}], "extra": 1})").status, 400);
  EXPECT_EQ(svc.select(R"({"profile": [{"term": "Chills", "count": 2}]})").status, 400);
  EXPECT_EQ(svc.select(R"({"profile": [{"term": "Chills"}], "params": {"lambda": 1}})").status, 400);
  EXPECT_EQ(svc.select(R"({"profile": [{"term": "Chills", "weight": -1}]})").status, 400);
  EXPECT_EQ(svc.select(R"({"profile": [{"term": "Chills"}], "params": {"info": "high"}})").status, 400);
}

TEST(Service, ParameterRangeViolationsAre422) {
  const SelectService svc(load_model("toy"));
  for (const char* params : {R"({"info": 0})", R"({"info": 1.5})", R"({"k": -1})", R"({"beta": -0.1})",
                             R"({"alpha": 0})", R"({"select_n": 4})", R"({"select_n": -1})"}) {
    const auto r = svc.select(std::string(R"({"profile": [{"term": "Chills"}], "params": )") + params + "}");
    EXPECT_EQ(r.status, 422) << params << " " << r.body;
  }
}

TEST(Service, CandidateOverrideAndParams) {
  const SelectService svc(load_model("toy"));
  const auto r = svc.select(R"({"profile": [{"term": "Chills"}],
                                "candidates": [{"item_id": "a", "terms": ["Chills"]}, {"item_id": "b", "terms": ["Headache"]}],
                                "params": {"select_n": 2, "info": 0.5}})");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = json::parse(r.body);
  EXPECT_EQ(doc["items"].size(), 2u);
  EXPECT_EQ(doc["n_selected"], 2);
  EXPECT_EQ(doc["info"], 0.5);
  EXPECT_EQ(doc["items"][0]["item_id"], "a");
}

TEST(Service, HealthReportsLoading) {
  SelectService svc;
  EXPECT_EQ(svc.health().status, 503);
  EXPECT_EQ(svc.select(R"({"profile": [{"term": "Chills"}]})").status, 503);
  svc.publish(load_model("toy"));
  const auto r = svc.health();
  ASSERT_EQ(r.status, 200);
  const auto doc = json::parse(r.body);
  EXPECT_EQ(doc["vocabulary_size"], 4);
  EXPECT_EQ(doc["dimension"], 4);
  EXPECT_EQ(doc["candidate_count"], 3);
  EXPECT_EQ(doc["version"], kVersion);
}

TEST(Service, HealthCountsA500TermStore) {
  const auto vocab = synth_vocabulary({.n_clusters = 10, .terms_per_cluster = 40, .n_noise = 100, .dimension = 16,
                                       .intra_cluster_similarity = 0.9, .seed = 1});
  auto model = std::make_shared<service::Model>();
  model->default_space = std::make_shared<const CandidateSpace>(std::make_shared<const EmbeddingStore>(vocab.store),
                                                                std::vector<CandidateItem>{{"c0", "", {vocab.clusters[0][0]}}});
  EXPECT_EQ(json::parse(SelectService(model).health().body)["vocabulary_size"], 500);
}

TEST(Http, RoutesOverRealSockets) {
  SelectService svc;
  httplib::Server server;
  service::install_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 503);

  svc.publish(load_model("toy"));
  res = client.Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(client.Get("/v1/healthz")->status, 404);

  res = client.Post("/v1/select", R"({"profile": [{"term": "Cough", "weight": 3}]})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
  EXPECT_EQ(client.Post("/v1/select", R"({"profile": [{"term": "Nope"}]})", "application/json")->status, 400);

  server.stop();
  t.join();
}

TEST(Parity, CliAndServiceScoresAgree) {
  for (const std::string set : {"toy", "golden"}) {
    const auto d = kFixtures / set;
    const auto out = fs::temp_directory_path() / ("prosel_parity_" + std::to_string(::getpid()) + "_" + set + ".json");
    const std::string cmd = std::string("'") + PROSEL_CLI_PATH + "' select --format json --embeddings '" +
                            (d / "embeddings.tsv").string() + "' --candidates '" + (d / "candidates.csv").string() +
                            "' --profile '" + (d / "profile.csv").string() + "' --out '" + out.string() + "' 2>/dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    const auto cli = json::parse(text::read_file(out));
    fs::remove(out);

    const auto r = SelectService(load_model(set)).select(profile_request(set).dump());
    ASSERT_EQ(r.status, 200);
    const auto svc = json::parse(r.body);
    EXPECT_EQ(cli["k_optimal"], svc["k_optimal"]);
    ASSERT_EQ(cli["items"].size(), svc["items"].size());
    for (std::size_t i = 0; i < cli["items"].size(); ++i) {
      const auto &a = cli["items"][i], &b = svc["items"][i];
      EXPECT_EQ(a["item_id"], b["item_id"]);
      EXPECT_EQ(a["selected"], b["selected"]);
      for (const char* key : {"relevance", "weight", "utility", "leverage"})
        EXPECT_NEAR(a[key].get<double>(), b[key].get<double>(), 1e-12) << set << " " << key;
    }
  }
}
