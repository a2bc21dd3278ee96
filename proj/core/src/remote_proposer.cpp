#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "carpool/remote_proposer.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "carpool/errors.hpp"

namespace carpool {
namespace {

bool transient(int status) { return status == 408 || status == 429 || status >= 500; }

const char* env_or_null(const char* name) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? v : nullptr;
}

}  // namespace

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig cfg;
  const char* url = env_or_null("CARPOOL_ENDPOINT_URL");
  if (url == nullptr) throw ConfigError("CARPOOL_ENDPOINT_URL is not set");
  cfg.url = url;
  if (const char* model = env_or_null("CARPOOL_MODEL")) cfg.model = model;
  if (const char* key = env_or_null("CARPOOL_API_KEY")) cfg.api_key = key;
  return cfg;
}

RemoteProposer::RemoteProposer(EndpointConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + config_.url);
  const auto path_start = config_.url.find('/', scheme_end + 3);
  host_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : config_.url.substr(path_start);
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

void RemoteProposer::log(const std::string& line) const {
  if (config_.log) config_.log(line);
}

std::string extract_completion_text(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw DecodeError("response body is not JSON");
  }
  if (!doc.is_object() || !doc.contains("choices")) throw DecodeError("response missing field 'choices'");
  const auto& choices = doc["choices"];
  if (!choices.is_array() || choices.empty()) throw DecodeError("response field 'choices' is empty");
  const auto& first = choices[0];
  if (!first.is_object() || !first.contains("message")) {
    throw DecodeError("response missing field 'choices[0].message'");
  }
  const auto& message = first["message"];
  if (!message.is_object() || !message.contains("content") || !message["content"].is_string()) {
    throw DecodeError("response missing field 'choices[0].message.content'");
  }
  auto text = message["content"].get<std::string>();
  if (text.empty()) throw DecodeError("response field 'choices[0].message.content' is empty");
  return text;
}

ProposerResponse RemoteProposer::propose(const ProposerRequest& request) {
  {
    std::unique_lock lock(mutex_);
    slot_free_.wait(lock, [this] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    RemoteProposer* self;
    ~Release() {
      {
        std::lock_guard lock(self->mutex_);
        --self->in_flight_;
      }
      self->slot_free_.notify_one();
    }
  } release{this};

  nlohmann::json body{{"model", config_.model},
                      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt.full_text}}})},
                      {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;
  const std::string payload = body.dump();

  httplib::Client client(host_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    log("POST " + host_ + path_ + " model=" + config_.model + " temperature=" + std::to_string(request.temperature) +
        " round=" + std::to_string(request.round_index) + " attempt=" + std::to_string(attempt + 1) +
        (config_.redact_content ? " content=<redacted>" : " content=" + request.prompt.full_text));
    auto res = client.Post(path_, headers, payload, "application/json");

    std::chrono::milliseconds delay = config_.initial_backoff * (1LL << std::min(attempt, 20));
    if (!res) {
      const auto err = httplib::to_string(res.error());
      log("transport error: " + err);
      if (attempt >= config_.max_retries) throw TransportError("request failed: " + err, attempt);
    } else {
      log("HTTP " + std::to_string(res->status) +
          (config_.redact_content ? std::string{} : " body=" + res->body));
      if (res->status >= 200 && res->status < 300) {
        ProposerResponse resp;
        resp.text = extract_completion_text(res->body);
        resp.provider = ProposerKind::kRemote;
        resp.retry_count = attempt;
        resp.latency = std::chrono::steady_clock::now() - start;
        return resp;
      }
      if (!transient(res->status) || attempt >= config_.max_retries) {
        throw StatusError(res->status, attempt, res->body);
      }
      if (res->has_header("Retry-After")) {
        try {
          delay = std::chrono::milliseconds(
              static_cast<long long>(std::stod(res->get_header_value("Retry-After")) * 1000.0));
        } catch (const std::exception&) {
          // HTTP-date form: keep the computed delay
        }
      }
    }
    std::this_thread::sleep_for(std::min(delay, config_.max_backoff));
  }
}

}  // namespace carpool
