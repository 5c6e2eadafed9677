#pragma once

#include <string>
#include <string_view>

namespace hlmax {

/// Writes to a sibling temporary file and renames it into place, so readers
/// never observe a partial artifact.
void write_file_atomic(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

}  // namespace hlmax
