#include "manifest.hpp"

#include <array>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "xrt/error.hpp"

#ifndef XRT_VERSION
#define XRT_VERSION "0.0.0"
#endif

namespace xrt::cli {

namespace {

std::string iso8601(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm utc{};
  gmtime_r(&t, &utc);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot read '" + path + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::format, "sha256 unavailable");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), start_(std::chrono::system_clock::now()) {}

nlohmann::json RunManifest::finish() const {
  nlohmann::json digests = nlohmann::json::object();
  for (const std::string& path : outputs_) digests[path] = sha256_file(path);
  return {{"toolVersion", XRT_VERSION},
          {"command", command_},
          {"argv", argv_},
          {"config", config_},
          {"seed", seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr)},
          {"start", iso8601(start_)},
          {"end", iso8601(std::chrono::system_clock::now())},
          {"exitCode", exit_code_},
          {"outputs", digests}};
}

void RunManifest::write(const std::string& path) const {
  if (path.empty()) return;
  const std::string text = finish().dump(2) + "\n";
  if (path == "-") {
    std::cerr << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::format, "cannot write manifest '" + path + "'");
  out << text;
}

}  // namespace xrt::cli
