#include "output.hpp"

#include <cstdio>
#include <fstream>

namespace exinf::app {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw OutputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw OutputError("cannot move output into place at " + path.string());
  }
}

std::string pattern_csv(const DetectorPattern& pattern) {
  std::string s = "x,probability,intensity\n";
  for (std::size_t b = 0; b < pattern.probabilities.size(); ++b) {
    s += format_real(pattern.bin_centers[b]);
    s += ',';
    s += format_real(pattern.probabilities[b]);
    s += ',';
    s += format_real(pattern.intensity[b]);
    s += '\n';
  }
  return s;
}

void write_pattern_csv(const DetectorPattern& pattern, const std::filesystem::path& path) {
  write_file_atomic(path, pattern_csv(pattern));
}

}  // namespace exinf::app
