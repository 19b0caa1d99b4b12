#include "qpack/csv.hpp"

#include <fstream>

#include "qpack/error.hpp"

namespace qpack {

std::string csv_header(const std::string& config_digest, const std::string& command) {
  return "# qpack " + std::string(kVersion) + " config_digest=" + config_digest + " command=" + command + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace qpack
