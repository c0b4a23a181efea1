#include "hecix/ingest/text_io.hpp"

#include <zlib.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "hecix/errors.hpp"

namespace hecix::ingest {

namespace {

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};

std::string inflate_file(const std::filesystem::path& path) {
  std::unique_ptr<gzFile_s, GzCloser> file(gzopen(path.c_str(), "rb"));
  if (!file) throw InputError("cannot open " + path.string());
  std::string out;
  char buffer[1 << 16];
  while (true) {
    const int n = gzread(file.get(), buffer, sizeof buffer);
    if (n < 0) {
      int errnum = 0;
      throw InputError("corrupt gzip stream in " + path.string() + ": " + gzerror(file.get(), &errnum));
    }
    if (n == 0) break;
    out.append(buffer, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw InputError("no such file: " + path.string());
  if (path.extension() == ".gz") return inflate_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hecix::ingest
