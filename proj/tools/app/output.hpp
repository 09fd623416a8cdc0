#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "exinf/doubleslit.hpp"

namespace exinf::app {

/// Thrown when an output file cannot be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that is byte-stable and keeps 17 significant digits.
std::string format_real(double x);

/// Writes `content` to a temporary sibling of `path`, then renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// `x,probability,intensity` header and one row per bin.
std::string pattern_csv(const DetectorPattern& pattern);
void write_pattern_csv(const DetectorPattern& pattern, const std::filesystem::path& path);

}  // namespace exinf::app
