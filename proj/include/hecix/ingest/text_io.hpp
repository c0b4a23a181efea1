#pragma once

#include <filesystem>
#include <string>

namespace hecix::ingest {

// Whole file as text; gzip-compressed files (".gz") are inflated.
// Throws InputError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hecix::ingest
