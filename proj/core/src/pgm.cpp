#include "pdmm/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace pdmm {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("PGM " + path + ": " + what);
}

// Next whitespace-delimited token, treating '#' to end-of-line as a comment.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

long parse_positive(std::istream& in, const std::string& path,
                    const char* field) {
  const std::string tok = next_token(in);
  if (tok.empty()) fail(path, std::string("missing ") + field);
  for (char ch : tok)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      fail(path, std::string("bad ") + field + " '" + tok + "'");
  return std::stol(tok);
}

}  // namespace

RMat read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");

  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") fail(path, "bad magic '" + magic + "'");
  const long width = parse_positive(in, path, "width");
  const long height = parse_positive(in, path, "height");
  const long maxval = parse_positive(in, path, "max value");
  if (width < 1 || height < 1) fail(path, "bad dimensions");
  if (maxval < 1 || maxval > 65535) fail(path, "bad max value");

  RMat img(height, width);
  const double mv = static_cast<double>(maxval);

  if (magic == "P2") {
    for (long r = 0; r < height; ++r)
      for (long c = 0; c < width; ++c) {
        const long v = parse_positive(in, path, "pixel");
        if (v > maxval) fail(path, "pixel exceeds max value");
        img(r, c) = static_cast<double>(v) / mv;
      }
    return img;
  }

  // P5: the header's max value is followed by exactly one whitespace byte.
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raster(static_cast<std::size_t>(width) * height *
                                    bytes_per);
  in.read(reinterpret_cast<char*>(raster.data()),
          static_cast<std::streamsize>(raster.size()));
  if (static_cast<std::size_t>(in.gcount()) != raster.size())
    fail(path, "truncated raster");
  std::size_t pos = 0;
  for (long r = 0; r < height; ++r)
    for (long c = 0; c < width; ++c) {
      long v = raster[pos++];
      if (bytes_per == 2) v = (v << 8) | raster[pos++];  // big-endian
      if (v > maxval) fail(path, "pixel exceeds max value");
      img(r, c) = static_cast<double>(v) / mv;
    }
  return img;
}

void write_pgm(const std::string& path, const RMat& image, int max_value) {
  if (image.rows() < 1 || image.cols() < 1)
    throw std::invalid_argument("write_pgm: empty image");
  if (max_value != 255 && max_value != 65535)
    throw std::invalid_argument("write_pgm: max value must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << image.cols() << " " << image.rows() << "\n" << max_value
      << "\n";
  const double mv = static_cast<double>(max_value);
  for (Index r = 0; r < image.rows(); ++r)
    for (Index c = 0; c < image.cols(); ++c) {
      const double clamped = std::min(1.0, std::max(0.0, image(r, c)));
      const long v = std::lround(clamped * mv);
      if (max_value > 255) out.put(static_cast<char>((v >> 8) & 0xff));
      out.put(static_cast<char>(v & 0xff));
    }
  if (!out) fail(path, "write failed");
}

}  // namespace pdmm
