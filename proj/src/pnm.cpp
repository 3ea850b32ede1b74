#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ncgtv/errors.hpp"
#include "ncgtv/imaging.hpp"

namespace ncgtv {

namespace {

void skip_space_and_comments(std::istream& is) {
  for (;;) {
    const int c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (c != EOF && std::isspace(c)) {
      is.get();
    } else {
      return;
    }
  }
}

long read_header_int(std::istream& is, const char* field) {
  skip_space_and_comments(is);
  long v = -1;
  if (!(is >> v) || v <= 0) throw IoError(std::string("pnm: bad or missing ") + field);
  return v;
}

}  // namespace

Image read_pnm(std::istream& is) {
  char magic[2] = {0, 0};
  if (!is.read(magic, 2) || magic[0] != 'P') throw IoError("pnm: missing magic number");
  const char kind = magic[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    throw IoError(std::string("pnm: unsupported format P") + kind);
  const bool ascii = kind == '2' || kind == '3';
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;

  const long w = read_header_int(is, "width");
  const long h = read_header_int(is, "height");
  const long maxval = read_header_int(is, "maxval");
  if (maxval > 255) throw IoError("pnm: only 8-bit images (maxval <= 255) are supported");
  if (w > 1 << 15 || h > 1 << 15) throw IoError("pnm: image too large");

  Image img(static_cast<int>(w), static_cast<int>(h), channels);
  const std::size_t count = img.pixels.size();
  if (ascii) {
    for (std::size_t k = 0; k < count; ++k) {
      long v = -1;
      if (!(is >> v)) throw IoError("pnm: truncated pixel data");
      if (v < 0 || v > maxval) throw IoError("pnm: sample out of range");
      img.pixels[k] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    // Exactly one whitespace byte separates the header from the raster.
    if (!std::isspace(is.get())) throw IoError("pnm: malformed header");
    std::string raw(count, '\0');
    if (!is.read(raw.data(), static_cast<std::streamsize>(count))) throw IoError("pnm: truncated pixel data");
    for (std::size_t k = 0; k < count; ++k) {
      const auto v = static_cast<unsigned char>(raw[k]);
      if (v > maxval) throw IoError("pnm: sample out of range");
      img.pixels[k] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return img;
}

void write_pnm(std::ostream& os, const Image& img) {
  os << (img.channels == 3 ? "P6" : "P5") << '\n' << img.width << ' ' << img.height << "\n255\n";
  std::string raw(img.pixels.size(), '\0');
  for (std::size_t k = 0; k < img.pixels.size(); ++k) {
    const double v = std::clamp(img.pixels[k], 0.0, 1.0);
    raw[k] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
  }
  os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

Image load_image(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  try {
    return read_pnm(is);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save_image(const Image& img, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_pnm(os, img);
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace ncgtv
