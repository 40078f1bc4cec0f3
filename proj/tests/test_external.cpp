#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "bp/external.hpp"
#include "bp/harness.hpp"

using namespace bp;

TEST_CASE("chat request and response bodies are well formed") {
  const std::string body = external::build_chat_request("test-model", "sys", "usr");
  auto doc = nlohmann::json::parse(body);
  CHECK(doc["model"] == "test-model");
  REQUIRE(doc["messages"].size() == 2);
  CHECK(doc["messages"][0]["role"] == "system");
  CHECK(doc["messages"][1]["content"] == "usr");

  const std::string reply =
      R"({"choices":[{"message":{"role":"assistant","content":"I accept."}}]})";
  CHECK(external::parse_chat_content(reply) == "I accept.");
  CHECK_THROWS_AS(external::parse_chat_content("{}"), ParseError);
  CHECK_THROWS_AS(external::parse_chat_content("not json"), ParseError);
}

TEST_CASE("config only materializes when the environment is set") {
  unsetenv("BP_EXTERNAL_BASE_URL");
  unsetenv("BP_EXTERNAL_MODEL");
  CHECK(!external::ExternalConfig::from_env().has_value());
  setenv("BP_EXTERNAL_BASE_URL", "http://127.0.0.1:1/v1", 1);
  CHECK(!external::ExternalConfig::from_env().has_value());  // model missing
  setenv("BP_EXTERNAL_MODEL", "scripted-oracle", 1);
  auto cfg = external::ExternalConfig::from_env();
  REQUIRE(cfg.has_value());
  CHECK(cfg->base_url == "http://127.0.0.1:1/v1");
  unsetenv("BP_EXTERNAL_BASE_URL");
  unsetenv("BP_EXTERNAL_MODEL");
}

namespace {

// Canned chat endpoint that always accepts, echoing request bookkeeping.
struct FakeEndpoint {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> calls{0};
  std::string last_request;

  FakeEndpoint() {
    server.Post("/v1/chat/completions",
                [this](const httplib::Request& req, httplib::Response& res) {
                  ++calls;
                  last_request = req.body;
                  res.set_content(
                      R"({"choices":[{"message":{"role":"assistant","content":"Decision: ACCEPT"}}]})",
                      "application/json");
                });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeEndpoint() {
    server.stop();
    thread.join();
  }
};

}  // namespace

TEST_CASE("external persuadee round trip against a local endpoint") {
  FakeEndpoint fake;
  if (fake.port <= 0) {
    MESSAGE("loopback listen unavailable in this sandbox; skipping");
    return;
  }
  external::ExternalConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(fake.port) + "/v1";
  cfg.model = "canned";
  external::ChatClient client(cfg);

  auto ex = client.complete("system text", "user text");
  CHECK(ex.content == "Decision: ACCEPT");
  CHECK(ex.request_body == fake.last_request);

  // Full case: scripted bp persuader, external persuadee.
  auto records = corpus::load_corpus("data/vertical_farm.json");
  agents::PersuaderPolicy persuader;
  persuader.kind = agents::PersuaderKind::bp_sfnl;
  agents::PersuadeePolicy persuadee;
  persuadee.kind = agents::PersuadeeKind::external;
  persuadee.rationality_boost = true;

  auto outcome = harness::run_case(persuader, persuadee, records[0], 42, {},
                                   harness::View::explicit_view, &client);
  CHECK(outcome.action == "Accept");
  CHECK(outcome.success);
  REQUIRE(outcome.prompt.has_value());
  CHECK(outcome.prompt->find("<msg_start>") != std::string::npos);
  CHECK(outcome.prompt->find("very rational person") != std::string::npos);
  REQUIRE(outcome.response.has_value());
  CHECK(*outcome.response == "Decision: ACCEPT");
  // bodies are logged verbatim
  REQUIRE(outcome.request_body.has_value());
  CHECK(*outcome.request_body == fake.last_request);
  REQUIRE(outcome.response_body.has_value());
  CHECK(outcome.response_body->find("\"choices\"") != std::string::npos);
  CHECK(fake.calls.load() >= 2);
}

TEST_CASE("self-derived view omits the setup block from external prompts") {
  FakeEndpoint fake;
  if (fake.port <= 0) return;
  external::ExternalConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(fake.port) + "/v1";
  cfg.model = "canned";
  external::ChatClient client(cfg);

  auto records = corpus::load_corpus("data/vertical_farm.json");
  agents::PersuaderPolicy persuader;
  persuader.kind = agents::PersuaderKind::bp_sfnl;
  agents::PersuadeePolicy persuadee;
  persuadee.kind = agents::PersuadeeKind::external;

  auto explicit_view = harness::run_case(persuader, persuadee, records[0], 7, {},
                                         harness::View::explicit_view, &client);
  REQUIRE(explicit_view.prompt.has_value());
  CHECK(explicit_view.prompt->find("Scenario Setup:") != std::string::npos);

  auto self_derived = harness::run_case(persuader, persuadee, records[0], 7, {},
                                        harness::View::self_derived, &client);
  REQUIRE(self_derived.prompt.has_value());
  CHECK(self_derived.prompt->find("Scenario Setup:") == std::string::npos);
  CHECK(self_derived.prompt->find("<msg_start>") != std::string::npos);
}

TEST_CASE("external persuader cannot face a scripted persuadee") {
  FakeEndpoint fake;
  if (fake.port <= 0) return;
  external::ExternalConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(fake.port) + "/v1";
  cfg.model = "canned";
  external::ChatClient client(cfg);

  auto records = corpus::load_corpus("data/vertical_farm.json");
  agents::PersuaderPolicy persuader;
  persuader.kind = agents::PersuaderKind::external;
  agents::PersuadeePolicy persuadee;
  persuadee.kind = agents::PersuadeeKind::bp_rational;
  CHECK_THROWS_AS(harness::run_case(persuader, persuadee, records[0], 1, {},
                                    harness::View::explicit_view, &client),
                  ConfigError);

  // But external vs external works end to end.
  agents::PersuadeePolicy ext;
  ext.kind = agents::PersuadeeKind::external;
  auto outcome = harness::run_case(persuader, ext, records[0], 1, {},
                                   harness::View::explicit_view, &client);
  CHECK(outcome.success);
  CHECK(outcome.signal == "external");
}

TEST_CASE("an all-undecidable external cell reports anomalies, not a mean") {
  httplib::Server server;
  server.Post("/v1/chat/completions",
              [](const httplib::Request&, httplib::Response& res) {
                res.set_content(
                    R"({"choices":[{"message":{"role":"assistant","content":"it depends"}}]})",
                    "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  if (port <= 0) return;
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  external::ExternalConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.model = "mumbler";
  external::ChatClient client(cfg);

  harness::ExperimentConfig config;
  config.corpus = "data/vertical_farm.json";
  agents::PersuaderPolicy sender;
  sender.kind = agents::PersuaderKind::bp_sfnl;
  agents::PersuadeePolicy receiver;
  receiver.kind = agents::PersuadeeKind::external;
  config.persuaders = {sender};
  config.persuadees = {receiver};
  config.cases_per_cell = 8;
  auto records = corpus::load_corpus(config.corpus);
  auto cell = harness::run_pairing(config, sender, receiver, records, {}, &client);
  CHECK(!cell.mean.has_value());
  CHECK(cell.anomalies == 8);
  CHECK(cell.n_effective() == 0);
  harness::ResultTable table;
  table.rows.push_back(cell);
  CHECK(harness::emit_report(table, harness::ReportFormat::markdown)
            .find("n/a") != std::string::npos);

  server.stop();
  th.join();
}

TEST_CASE("missing endpoint configuration is a clear error") {
  auto records = corpus::load_corpus("data/vertical_farm.json");
  agents::PersuaderPolicy persuader;
  persuader.kind = agents::PersuaderKind::bp_sfnl;
  agents::PersuadeePolicy persuadee;
  persuadee.kind = agents::PersuadeeKind::external;
  CHECK_THROWS_AS(harness::run_case(persuader, persuadee, records[0], 1, {},
                                    harness::View::explicit_view, nullptr),
                  ConfigError);
}
