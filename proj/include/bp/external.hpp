#pragma once

#include <optional>
#include <string>

namespace bp::external {

// Chat-completion endpoint configuration, taken from the environment:
//   BP_EXTERNAL_BASE_URL  e.g. http://127.0.0.1:8080/v1
//   BP_EXTERNAL_MODEL     model id sent in the request body
//   BP_EXTERNAL_API_KEY   optional bearer token
struct ExternalConfig {
  std::string base_url;
  std::string model;
  std::string api_key;

  static std::optional<ExternalConfig> from_env();
};

struct ChatExchange {
  std::string request_body;   // verbatim, for the transcript
  std::string response_body;  // verbatim
  std::string content;        // choices[0].message.content
};

// Pure helpers, unit-testable without a server.
std::string build_chat_request(const std::string& model, const std::string& system,
                               const std::string& user);
std::string parse_chat_content(const std::string& response_body);

class ChatClient {
 public:
  explicit ChatClient(ExternalConfig config);

  // POSTs {base_url}/chat/completions and returns the exchange. Throws
  // ConfigError on transport failure, ParseError on a malformed reply.
  ChatExchange complete(const std::string& system, const std::string& user) const;

  const ExternalConfig& config() const { return config_; }

 private:
  ExternalConfig config_;
  std::string origin_;       // scheme://host:port
  std::string path_prefix_;  // e.g. /v1
};

}  // namespace bp::external
