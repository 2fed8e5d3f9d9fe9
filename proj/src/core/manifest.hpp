#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace tracerank {

// Run manifest: the command, its parameter set, and SHA-256 digests of every
// input and output file. Files are keyed by basename, never by full path, so
// the same run in two directories produces byte-identical manifests and
// digest equality doubles as the reproducibility check.
struct Manifest {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, std::string>> inputs;   // basename -> sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // basename -> sha256

  // Digests the named files (in order) into inputs/outputs.
  void add_input(const std::string& path);
  void add_output(const std::string& path);

  std::string to_json() const;
};

void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace tracerank
