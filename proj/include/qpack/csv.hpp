#pragma once

#include <string>

namespace qpack {

inline constexpr const char* kVersion = "0.1.0";

/// Comment line opening every output file: tool version, config digest and command.
std::string csv_header(const std::string& config_digest, const std::string& command);

/// Writes `content` to `path`, raising ErrorKind::Io on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qpack
