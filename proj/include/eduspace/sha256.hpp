#pragma once

#include <cstdint>
#include <string>

namespace eduspace {

// FIPS 180-4 SHA-256, hex digest. Used for config and artifact fingerprints
// in run manifests; no crypto dependency wanted for that.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);  // throws Error{IoError}

}  // namespace eduspace
