// Copyright 2026 The dptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serves a toy model table over the dense-logits HTTP protocol, so the
// remote provider path can be exercised end to end without a real model.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dptext/errors.hpp"
#include "dptext/toy_model.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"toy logit server"};
  std::string spec_path;
  std::string host = "127.0.0.1";
  int port = 8123;
  app.add_option("--spec", spec_path, "toy model table file")->required();
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "port (0 picks a free one)");
  CLI11_PARSE(app, argc, argv);

  try {
    dptext::ToyModel model(dptext::ToyModelSpec::load(spec_path));
    httplib::Server server;

    server.Get("/v1/model", [&](const httplib::Request&,
                                httplib::Response& res) {
      res.set_content(json{{"model", "toy"},
                           {"vocab_size", model.vocab_size()},
                           {"eos_id", model.eos_token()}}
                          .dump(),
                      "application/json");
    });

    server.Post("/v1/logits", [&](const httplib::Request& req,
                                  httplib::Response& res) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("tokens")) {
        res.status = 400;
        res.set_content(json{{"error", "missing tokens"}}.dump(),
                        "application/json");
        return;
      }
      try {
        const auto tokens = body.at("tokens").get<dptext::TokenSequence>();
        res.set_content(json{{"logits", model.logits_for_prefix(tokens)}}.dump(),
                        "application/json");
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });

    server.Post("/v1/encode", [&](const httplib::Request& req,
                                  httplib::Response& res) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("text")) {
        res.status = 400;
        res.set_content(json{{"error", "missing text"}}.dump(),
                        "application/json");
        return;
      }
      try {
        res.set_content(
            json{{"tokens", model.encode(body.at("text").get<std::string>())}}
                .dump(),
            "application/json");
      } catch (const dptext::EncodingError& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });

    server.Post("/v1/decode", [&](const httplib::Request& req,
                                  httplib::Response& res) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("tokens")) {
        res.status = 400;
        res.set_content(json{{"error", "missing tokens"}}.dump(),
                        "application/json");
        return;
      }
      try {
        res.set_content(
            json{{"text",
                  model.decode(body.at("tokens").get<dptext::TokenSequence>())}}
                .dump(),
            "application/json");
      } catch (const dptext::EncodingError& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });

    if (port == 0) {
      port = server.bind_to_any_port(host);
      std::cout << "listening on " << host << ":" << port << std::endl;
      server.listen_after_bind();
    } else {
      std::cout << "listening on " << host << ":" << port << std::endl;
      server.listen(host, port);
    }
  } catch (const dptext::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
