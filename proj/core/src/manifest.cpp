#include "levnano/manifest.hpp"

#include <openssl/evp.h>

#include <memory>
#include "json.hpp"

#include "levnano/errors.hpp"
#include "levnano/timeseries_io.hpp"

#ifndef LEVNANO_VERSION
#define LEVNANO_VERSION "0.0.0"
#endif

namespace levnano {

const char* tool_version() { return LEVNANO_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw NumericalFailure("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void RunManifest::add_input(const std::filesystem::path& file) {
  inputs.push_back({file.generic_string(), sha256_file(file), std::filesystem::file_size(file)});
}

void RunManifest::add_output(const std::filesystem::path& root, const std::filesystem::path& file) {
  auto full = file.is_absolute() ? file : root / file;
  auto rel = std::filesystem::relative(full, root);
  outputs.push_back({rel.generic_string(), sha256_file(full), std::filesystem::file_size(full)});
}

std::string RunManifest::to_json() const {
  using nlohmann::json;
  auto files = [](const std::vector<ManifestFile>& v) {
    json a = json::array();
    for (const auto& f : v) a.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return a;
  };
  json j;
  j["tool"] = "levnano";
  j["tool_version"] = tool_version;
  j["command"] = command;
  j["config_sha256"] = config_hash;
  j["seed"] = seed;
  j["inputs"] = files(inputs);
  j["outputs"] = files(outputs);
  json t = json::array();
  for (const auto& s : timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  j["timings"] = t;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const { write_file(path, to_json()); }

}  // namespace levnano
