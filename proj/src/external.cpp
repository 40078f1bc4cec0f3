#include "bp/external.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "bp/errors.hpp"

namespace bp::external {

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

}  // namespace

std::optional<ExternalConfig> ExternalConfig::from_env() {
  auto url = env("BP_EXTERNAL_BASE_URL");
  auto model = env("BP_EXTERNAL_MODEL");
  if (!url || !model) return std::nullopt;
  ExternalConfig cfg;
  cfg.base_url = *url;
  cfg.model = *model;
  cfg.api_key = env("BP_EXTERNAL_API_KEY").value_or("");
  return cfg;
}

std::string build_chat_request(const std::string& model, const std::string& system,
                               const std::string& user) {
  nlohmann::ordered_json body = {
      {"model", model},
      {"messages",
       {{{"role", "system"}, {"content", system}},
        {{"role", "user"}, {"content", user}}}},
  };
  return body.dump();
}

std::string parse_chat_content(const std::string& response_body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(response_body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("chat.response", e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    throw ParseError("chat.response.choices", "missing or empty");
  }
  const auto& msg = doc["choices"][0];
  if (!msg.contains("message") || !msg["message"].contains("content") ||
      !msg["message"]["content"].is_string()) {
    throw ParseError("chat.response.choices[0].message.content", "missing");
  }
  return msg["message"]["content"].get<std::string>();
}

ChatClient::ChatClient(ExternalConfig config) : config_(std::move(config)) {
  std::string rest = config_.base_url;
  const auto scheme_end = rest.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("BP_EXTERNAL_BASE_URL must look like http://host:port[/path]");
  }
  const auto path_start = rest.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    origin_ = rest;
  } else {
    origin_ = rest.substr(0, path_start);
    path_prefix_ = rest.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

ChatExchange ChatClient::complete(const std::string& system,
                                  const std::string& user) const {
  ChatExchange ex;
  ex.request_body = build_chat_request(config_.model, system, user);

  httplib::Client client(origin_);
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post(path_prefix_ + "/chat/completions", headers,
                         ex.request_body, "application/json");
  if (!res) {
    throw ConfigError("external endpoint unreachable: " + origin_);
  }
  if (res->status != 200) {
    throw ConfigError("external endpoint returned HTTP " +
                      std::to_string(res->status));
  }
  ex.response_body = res->body;
  ex.content = parse_chat_content(ex.response_body);
  return ex;
}

}  // namespace bp::external
