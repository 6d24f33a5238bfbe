// prosel-server: JSON-over-HTTP facade for the selection pipeline.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "http_routes.hpp"
#include "prosel/pipeline.hpp"
#include "prosel/scoring.hpp"
#include "prosel/service.hpp"
#include "prosel/termspace.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prosel-server: HTTP facade (POST /v1/select, GET /v1/health)"};
  std::string listen = env_or("PROSEL_LISTEN", "127.0.0.1:8080");
  std::string embeddings = env_or("PROSEL_EMBEDDINGS", "");
  std::string candidates = env_or("PROSEL_CANDIDATES", "");
  app.add_option("--listen", listen, "host:port to bind (env PROSEL_LISTEN; default: 127.0.0.1:8080)");
  app.add_option("--embeddings", embeddings, "Embedding file, .tsv or .json (env PROSEL_EMBEDDINGS)");
  app.add_option("--candidates", candidates, "Default candidate CSV (env PROSEL_CANDIDATES)");
  CLI11_PARSE(app, argc, argv);

  if (embeddings.empty() || candidates.empty()) {
    std::cerr << "error: --embeddings and --candidates (or their environment variables) are required\n";
    return 2;
  }
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "error: --listen expects host:port\n";
    return 2;
  }
  const std::string host = listen.substr(0, colon);
  const int port = std::atoi(listen.c_str() + colon + 1);

  prosel::service::SelectService service;
  httplib::Server server;
  prosel::service::install_routes(server, service);

  // Health answers 503 until the store and candidates are loaded.
  std::thread loader([&] {
    try {
      auto store = std::make_shared<const prosel::EmbeddingStore>(prosel::load_store_file(embeddings));
      auto items = prosel::parse_candidates_csv(prosel::text::read_file(candidates), candidates);
      auto model = std::make_shared<prosel::service::Model>();
      model->default_space = std::make_shared<const prosel::CandidateSpace>(std::move(store), std::move(items));
      service.publish(std::move(model));
      std::cerr << "model loaded; serving on " << listen << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: failed to load model: " << e.what() << std::endl;
      std::_Exit(2);
    }
  });

  const bool ok = server.listen(host, port);
  if (!ok) std::cerr << "error: cannot listen on " << listen << "\n";
  loader.join();
  return ok ? 0 : 1;
}
