#ifndef FRACLAP_PGM_HPP
#define FRACLAP_PGM_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

/// Grayscale raster as read from disk, values scaled to [0, 1].
struct RawImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int maxval = 255;
  std::vector<double> data;  ///< row-major
};

namespace detail {

inline void skip_ws_and_comments(std::istream& in) {
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline long read_header_int(std::istream& in, const std::string& path) {
  skip_ws_and_comments(in);
  long v = -1;
  if (!(in >> v) || v <= 0) throw IoError(path + ": malformed PGM header");
  return v;
}

}  // namespace detail

/// Reads binary (P5, 8 or 16 bit big-endian) or ASCII (P2) PGM.
inline RawImage read_pgm(std::istream& in, const std::string& path = "<stream>") {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw IoError(path + ": not a PGM file (expected P5 or P2)");
  }
  RawImage img;
  img.width = static_cast<std::size_t>(detail::read_header_int(in, path));
  img.height = static_cast<std::size_t>(detail::read_header_int(in, path));
  const long maxval = detail::read_header_int(in, path);
  if (maxval > 65535) throw IoError(path + ": maxval above 65535");
  img.maxval = static_cast<int>(maxval);
  const std::size_t count = img.width * img.height;
  img.data.resize(count);
  const auto scale = static_cast<double>(maxval);

  if (magic[1] == '2') {
    for (std::size_t i = 0; i < count; ++i) {
      detail::skip_ws_and_comments(in);
      long v = -1;
      if (!(in >> v) || v < 0 || v > maxval) throw IoError(path + ": bad or missing ASCII sample " + std::to_string(i));
      img.data[i] = static_cast<double>(v) / scale;
    }
    return img;
  }

  in.get();  // single whitespace byte before the raster
  const std::size_t bps = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(count * bps);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw IoError(path + ": truncated raster");
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = bps == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
    if (v > static_cast<unsigned>(maxval)) throw IoError(path + ": sample exceeds maxval");
    img.data[i] = static_cast<double>(v) / scale;
  }
  return img;
}

inline RawImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  return read_pgm(in, path);
}

/// Writes binary P5. Values are clamped to [0, 1] and rounded to maxval steps.
inline void write_pgm(std::ostream& out, const RawImage& img) {
  if (img.maxval < 1 || img.maxval > 65535) throw IoError("write_pgm: maxval must be in [1, 65535]");
  if (img.data.size() != img.width * img.height) throw IoError("write_pgm: data size mismatch");
  out << "P5\n" << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
  const bool wide = img.maxval > 255;
  std::vector<unsigned char> raw;
  raw.reserve(img.data.size() * (wide ? 2 : 1));
  for (double v : img.data) {
    const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    const auto q = static_cast<unsigned>(std::lround(c * img.maxval));
    if (wide) raw.push_back(static_cast<unsigned char>(q >> 8));
    raw.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

inline void write_pgm(const std::string& path, const RawImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  write_pgm(out, img);
  if (!out) throw IoError(path + ": write failed");
}

inline RawImage to_raw(const PixelGrid& g, int maxval = 255) {
  return RawImage{g.size(), g.size(), maxval, std::vector<double>(g.values().begin(), g.values().end())};
}

/// Square grid of even side obtained from an image, and how to undo it.
struct Padded {
  PixelGrid grid;
  std::size_t width = 0;
  std::size_t height = 0;
};

/// Accepts even square images as they are. Otherwise, with `pad`, mirrors the
/// image (whole-sample symmetric) into the next even square; without it the
/// image is refused.
inline Padded to_grid(const RawImage& img, bool pad, const std::string& path = "<image>") {
  if (img.width == img.height && img.width % 2 == 0 && img.width >= 2) {
    return {PixelGrid(img.width, img.data), img.width, img.height};
  }
  if (!pad) {
    throw IoError(path + ": image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                  "; a square image of even side is required (use --pad)");
  }
  std::size_t n = std::max(img.width, img.height);
  n += n % 2;
  auto reflect = [](std::size_t i, std::size_t len) {
    if (len == 1) return std::size_t{0};
    const std::size_t period = 2 * len - 2;
    std::size_t r = i % period;
    return r < len ? r : period - r;
  };
  PixelGrid g(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) g(r, c) = img.data[reflect(r, img.height) * img.width + reflect(c, img.width)];
  return {std::move(g), img.width, img.height};
}

/// Crops a padded grid back to the original extent.
inline RawImage crop(const PixelGrid& g, std::size_t width, std::size_t height, int maxval = 255) {
  RawImage out{width, height, maxval, std::vector<double>(width * height)};
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) out.data[r * width + c] = g(r, c);
  return out;
}

}  // namespace fraclap

#endif  // FRACLAP_PGM_HPP
