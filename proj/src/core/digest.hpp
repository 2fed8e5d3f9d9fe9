#pragma once

#include <string>
#include <string_view>

namespace tracerank {

// Lowercase hex SHA-256, the digest used throughout run manifests.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::string& path);

}  // namespace tracerank
