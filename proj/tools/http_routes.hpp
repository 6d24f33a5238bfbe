#pragma once

#include "httplib.h"
#include "prosel/service.hpp"

namespace prosel::service {

/// Binds the /v1 endpoints. Unmatched paths fall through to httplib's 404.
inline void install_routes(httplib::Server& server, const SelectService& service) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get("/v1/health", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.health());
  });
  server.Post("/v1/select", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.select(req.body));
  });
}

}  // namespace prosel::service
