#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

#include "carpool/proposer.hpp"

namespace carpool {

/// Chat-completions endpoint settings.
struct EndpointConfig {
  std::string url;      // full endpoint URL; "/v1/chat/completions" is appended when no path is given
  std::string model;
  std::string api_key;  // sent as a Bearer token, never logged
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8'000};
  std::chrono::milliseconds timeout{60'000};
  std::size_t max_in_flight = 4;
  bool redact_content = true;  // drop prompt/response text from log lines
  std::function<void(std::string_view)> log;

  /// CARPOOL_ENDPOINT_URL, CARPOOL_MODEL, CARPOOL_API_KEY. Throws ConfigError
  /// when the URL is missing.
  static EndpointConfig from_env();
};

/// Sends {model, messages: [{role: "user", content: prompt}], temperature}
/// and returns choices[0].message.content.
///
/// 408, 429, 5xx and transport failures are retried with exponential
/// backoff (Retry-After, when numeric, replaces the computed delay up to
/// max_backoff). Other statuses fail at once with StatusError; a body
/// without the expected fields fails with DecodeError naming the field.
class RemoteProposer final : public Proposer {
 public:
  explicit RemoteProposer(EndpointConfig config);

  ProposerResponse propose(const ProposerRequest& request) override;
  ProposerKind kind() const noexcept override { return ProposerKind::kRemote; }

 private:
  void log(const std::string& line) const;

  EndpointConfig config_;
  std::string host_;  // scheme://host[:port]
  std::string path_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  std::size_t in_flight_ = 0;
};

/// Pulls choices[0].message.content out of a response body.
std::string extract_completion_text(std::string_view body);

}  // namespace carpool
