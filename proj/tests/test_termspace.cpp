#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "prosel/matrix.hpp"
#include "prosel/termspace.hpp"

using namespace prosel;

namespace {

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine(const EmbeddingStore& s, const std::string& a, const std::string& b) { return dot(s.at(a), s.at(b)); }

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(LoadStore, NormalizesTsvRows) {
  const auto store = load_store("a\t3\t4\nb\t1\t0\n", StoreFormat::tsv);
  ASSERT_EQ(store.size(), 2u);
  EXPECT_EQ(store.dimension(), 2u);
  EXPECT_DOUBLE_EQ(store.at("a")[0], 0.6);
  EXPECT_DOUBLE_EQ(store.at("a")[1], 0.8);
  EXPECT_DOUBLE_EQ(store.at("b")[0], 1.0);
  EXPECT_DOUBLE_EQ(store.at("b")[1], 0.0);
}

TEST(LoadStore, SkipsCommentsTrimsTermsAndReadsScientificNotation) {
  const auto store = load_store("# header\n  Dry mouth \t1e0\t0.0E+00\n\nCough\t-2.5e-1\t0\n", StoreFormat::tsv);
  EXPECT_TRUE(store.contains("Dry mouth"));
  EXPECT_DOUBLE_EQ(store.at("Cough")[0], -1.0);
}

TEST(LoadStore, DuplicateTermIsNamed) {
  const auto msg = error_of([] { load_store("Cough\t1\t0\nFever\t0\t1\nCough\t1\t1\n", StoreFormat::tsv, "emb.tsv"); });
  EXPECT_NE(msg.find("Cough"), std::string::npos);
  EXPECT_NE(msg.find("duplicate"), std::string::npos);
  EXPECT_NE(msg.find("emb.tsv:3"), std::string::npos);
}

TEST(LoadStore, ErrorsReportLineAndTerm) {
  auto msg = error_of([] { load_store("a\t1\t0\nb\t1\t0\t0\n", StoreFormat::tsv, "f"); });
  EXPECT_NE(msg.find("f:2"), std::string::npos);
  EXPECT_NE(msg.find("\"b\""), std::string::npos);
  EXPECT_NE(msg.find("dimension mismatch"), std::string::npos);

  msg = error_of([] { load_store("a\t1\t0\nzero\t0\t0\n", StoreFormat::tsv, "f"); });
  EXPECT_NE(msg.find("f:2"), std::string::npos);
  EXPECT_NE(msg.find("zero-norm"), std::string::npos);

  msg = error_of([] { load_store("a\t1\tx1\n", StoreFormat::tsv, "f"); });
  EXPECT_NE(msg.find("f:1"), std::string::npos);
  EXPECT_NE(msg.find("unparsable"), std::string::npos);

  EXPECT_THROW(load_store("a\tnan\t1\n", StoreFormat::tsv), InputError);
  EXPECT_THROW(load_store("# only comments\n", StoreFormat::tsv), InputError);
  EXPECT_THROW(load_store("lonely\n", StoreFormat::tsv), InputError);
}

TEST(LoadStore, JsonFormat) {
  const auto store = load_store(R"({"dimension": 2, "terms": {"a": [3, 4], "b": [0, 2]}})", StoreFormat::json);
  EXPECT_DOUBLE_EQ(store.at("a")[1], 0.8);
  EXPECT_DOUBLE_EQ(store.at("b")[1], 1.0);
  EXPECT_EQ(store.terms().front(), "a");
}

TEST(LoadStore, JsonErrors) {
  auto msg = error_of([] { load_store(R"({"dimension": 2, "terms": {"Cough": [1, 0], "Cough": [0, 1]}})", StoreFormat::json); });
  EXPECT_NE(msg.find("Cough"), std::string::npos);
  msg = error_of([] { load_store(R"({"dimension": 3, "terms": {"a": [1, 0]}})", StoreFormat::json); });
  EXPECT_NE(msg.find("dimension mismatch"), std::string::npos);
  EXPECT_THROW(load_store(R"({"terms": {"a": [1, "x"]}})", StoreFormat::json), InputError);
  EXPECT_THROW(load_store(R"({"terms": [1, 2]})", StoreFormat::json), InputError);
  EXPECT_THROW(load_store(R"({"terms": )", StoreFormat::json), InputError);
}

TEST(EmbeddingStore, AbsentTermIsAnError) {
  const auto store = load_store("a\t1\t0\n", StoreFormat::tsv);
  EXPECT_THROW(store.at("b"), UnresolvedTermsError);
  try {
    store.require_all(std::vector<std::string>{"a", "x", "y", "x"});
    FAIL() << "expected UnresolvedTermsError";
  } catch (const UnresolvedTermsError& e) {
    EXPECT_EQ(e.terms(), (std::vector<std::string>{"x", "y"}));
  }
}

TEST(SaveStore, RoundTripsBothFormats) {
  const auto vocab = synth_vocabulary({.n_clusters = 10, .terms_per_cluster = 40, .n_noise = 100, .dimension = 64,
                                       .intra_cluster_similarity = 0.8, .seed = 7});
  ASSERT_EQ(vocab.store.size(), 500u);
  for (auto format : {StoreFormat::tsv, StoreFormat::json}) {
    const auto reloaded = load_store(save_store(vocab.store, format), format);
    ASSERT_EQ(reloaded.size(), vocab.store.size());
    ASSERT_EQ(reloaded.dimension(), 64u);
    double worst = 0;
    for (const auto& term : vocab.store.terms()) {
      auto a = vocab.store.at(term);
      auto b = reloaded.at(term);
      for (std::size_t d = 0; d < a.size(); ++d) worst = std::max(worst, std::abs(a[d] - b[d]));
    }
    EXPECT_LE(worst, 1e-12);
  }
}

TEST(SaveStore, EveryLoadedVectorIsUnitNorm) {
  const auto store = load_store("a\t10\t-3\t0.5\nb\t1e-8\t2e-8\t0\nc\t-7\t7\t7\n", StoreFormat::tsv);
  for (std::size_t i = 0; i < store.size(); ++i) EXPECT_NEAR(norm(store.vector_at(i)), 1.0, 1e-9);
}

TEST(SynthVocabulary, TightClusterIsCoherent) {
  const auto v = synth_vocabulary({.n_clusters = 1, .terms_per_cluster = 3, .n_noise = 0, .dimension = 8,
                                   .intra_cluster_similarity = 0.99, .seed = 42});
  const auto& c = v.clusters.at(0);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_GT(cosine(v.store, c[0], c[1]), 0.9);
  EXPECT_GT(cosine(v.store, c[0], c[2]), 0.9);
  EXPECT_GT(cosine(v.store, c[1], c[2]), 0.9);
}

TEST(SynthVocabulary, HighDimensionalClustersAreNearlyOrthogonal) {
  const auto v = synth_vocabulary({.n_clusters = 2, .terms_per_cluster = 1, .n_noise = 0, .dimension = 1000,
                                   .intra_cluster_similarity = 0.99, .seed = 1});
  EXPECT_LT(std::abs(cosine(v.store, v.clusters[0][0], v.clusters[1][0])), 0.2);
}

TEST(SynthVocabulary, IsAPureFunctionOfItsArguments) {
  const SynthParams p{.n_clusters = 4, .terms_per_cluster = 5, .n_noise = 30, .dimension = 32,
                      .intra_cluster_similarity = 0.9, .seed = 99};
  const auto a = synth_vocabulary(p);
  const auto b = synth_vocabulary(p);
  EXPECT_TRUE(a.store == b.store);
  EXPECT_EQ(a.clusters, b.clusters);
  EXPECT_EQ(a.noise, b.noise);
  auto q = p;
  q.seed = 100;
  EXPECT_FALSE(synth_vocabulary(q).store == a.store);
}

TEST(SynthVocabulary, MeanPairwiseCosineTracksTargetSquared) {
  // Two members are independent perturbations of one centroid, so their mean
  // cosine is close to the square of the member-to-centroid target.
  for (double target : {0.6, 0.8, 0.95}) {
    const auto v = synth_vocabulary({.n_clusters = 1, .terms_per_cluster = 120, .n_noise = 0, .dimension = 64,
                                     .intra_cluster_similarity = target, .seed = 3});
    const auto& c = v.clusters[0];
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j, ++n) sum += cosine(v.store, c[i], c[j]);
    EXPECT_NEAR(sum / n, target * target, 0.03) << "target " << target;
  }
}

TEST(SynthVocabulary, RejectsBadParameters) {
  EXPECT_THROW(synth_vocabulary({.n_clusters = 1, .terms_per_cluster = 1, .dimension = 1}), ParameterError);
  EXPECT_THROW(synth_vocabulary({.n_clusters = 1, .terms_per_cluster = 1, .dimension = 4, .intra_cluster_similarity = 1.0}),
               ParameterError);
  EXPECT_THROW(synth_vocabulary({.n_clusters = 1, .terms_per_cluster = 1, .dimension = 4, .intra_cluster_similarity = 0.0}),
               ParameterError);
  EXPECT_THROW(synth_vocabulary({.n_clusters = 0, .terms_per_cluster = 1, .n_noise = 0, .dimension = 4}), ParameterError);
}
