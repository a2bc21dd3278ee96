#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace carpool::cli {

/// manifest.json at the root of --out. Written when a command starts and
/// rewritten with the outcome when it ends.
class RunManifest {
 public:
  RunManifest(std::filesystem::path out_dir, std::string command, std::vector<std::string> argv,
              std::string effective_config, std::uint64_t seed);

  void add_artifact(const std::filesystem::path& path);
  void finish(int exit_code, const std::string& message = {});
  const std::filesystem::path& out_dir() const noexcept { return out_dir_; }

 private:
  void write() const;

  std::filesystem::path out_dir_;
  nlohmann::json doc_;
};

}  // namespace carpool::cli
