#include "manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

namespace carpool::cli {
namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest::RunManifest(std::filesystem::path out_dir, std::string command, std::vector<std::string> argv,
                         std::string effective_config, std::uint64_t seed)
    : out_dir_(std::move(out_dir)) {
  std::filesystem::create_directories(out_dir_);
  doc_ = {{"command", std::move(command)},
          {"argv", std::move(argv)},
          {"config", std::move(effective_config)},
          {"seed", seed},
          {"tool_version", CARPOOL_VERSION},
          {"started_at", utc_now()},
          {"status", "running"},
          {"artifacts", nlohmann::json::array()}};
  write();
}

void RunManifest::add_artifact(const std::filesystem::path& path) {
  doc_["artifacts"].push_back(std::filesystem::relative(path, out_dir_).generic_string());
}

void RunManifest::finish(int exit_code, const std::string& message) {
  doc_["finished_at"] = utc_now();
  doc_["exit_code"] = exit_code;
  doc_["status"] = exit_code == 0 ? "ok" : "failed";
  if (!message.empty()) doc_["message"] = message;
  write();
}

void RunManifest::write() const {
  std::ofstream out(out_dir_ / "manifest.json", std::ios::binary);
  out << doc_.dump(2) << '\n';
}

}  // namespace carpool::cli
