#pragma once

#include <string>

namespace vsseq {

// Writes content to path via a temp file + rename so readers never observe
// a partially written artifact.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace vsseq
