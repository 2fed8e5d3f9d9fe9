#include "core/manifest.hpp"

#include <filesystem>

#include "core/digest.hpp"
#include "core/serialize.hpp"
#include "core/version.hpp"

namespace tracerank {

namespace {
std::string basename_of(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}
}  // namespace

void Manifest::add_input(const std::string& path) {
  inputs.emplace_back(basename_of(path), sha256_file_hex(path));
}

void Manifest::add_output(const std::string& path) {
  outputs.emplace_back(basename_of(path), sha256_file_hex(path));
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["parameters"] = parameters;
  auto files = [](const std::vector<std::pair<std::string, std::string>>& v) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [name, digest] : v) obj[name] = digest;
    return obj;
  };
  j["inputs"] = files(inputs);
  j["outputs"] = files(outputs);
  return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  write_text_file(path, manifest.to_json());
}

}  // namespace tracerank
