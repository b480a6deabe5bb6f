#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace xrt::cli {

std::string sha256_file(const std::string& path);

// One per run: what was asked, with which seed, and digests of what was written.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_output(const std::string& path) { outputs_.push_back(path); }
  void set_exit_code(int code) { exit_code_ = code; }

  nlohmann::json finish() const;
  // "-" writes to stderr, an empty path writes nothing.
  void write(const std::string& path) const;

 private:
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::json config_ = nlohmann::json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> outputs_;
  int exit_code_ = 0;
  std::chrono::system_clock::time_point start_;
};

}  // namespace xrt::cli
