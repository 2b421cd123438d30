#include "siqa/netpbm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "siqa/errors.hpp"

namespace siqa {

namespace {

struct Cursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  std::uint8_t peek() const { return bytes[pos]; }
  std::uint8_t take() { return bytes[pos++]; }
};

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// Skips whitespace and '#' comments between header tokens.
void skip_separators(Cursor& cur) {
  while (!cur.eof()) {
    if (is_space(cur.peek())) {
      cur.take();
    } else if (cur.peek() == '#') {
      while (!cur.eof() && cur.take() != '\n') {
      }
    } else {
      break;
    }
  }
}

int parse_int(Cursor& cur) {
  skip_separators(cur);
  if (cur.eof() || cur.peek() < '0' || cur.peek() > '9') {
    throw CorruptData("malformed netpbm header");
  }
  long value = 0;
  while (!cur.eof() && cur.peek() >= '0' && cur.peek() <= '9') {
    value = value * 10 + (cur.take() - '0');
    if (value > 1 << 24) throw CorruptData("netpbm header value out of range");
  }
  return static_cast<int>(value);
}

std::uint8_t to_byte(double v) {
  const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

std::vector<std::uint8_t> encode_netpbm(const char* magic, int width,
                                        int height, int channels,
                                        const double* data) {
  char header[64];
  const int len =
      std::snprintf(header, sizeof(header), "%s\n%d %d\n255\n", magic, width,
                    height);
  std::vector<std::uint8_t> out(header, header + len);
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(to_byte(data[i]));
  return out;
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) throw CorruptData("file too short");
  const char m0 = static_cast<char>(bytes[0]);
  const char m1 = static_cast<char>(bytes[1]);
  int channels = 0;
  if (m0 == 'P' && m1 == '6') {
    channels = 3;
  } else if (m0 == 'P' && m1 == '5') {
    channels = 1;
  } else {
    throw UnsupportedFormat("unknown magic");
  }

  Cursor cur{bytes, 2};
  const int width = parse_int(cur);
  const int height = parse_int(cur);
  const int maxval = parse_int(cur);
  if (width <= 0 || height <= 0) throw CorruptData("bad dimensions");
  if (maxval != 255) throw UnsupportedFormat("only 8-bit samples supported");
  if (cur.eof() || !is_space(cur.peek())) {
    throw CorruptData("missing raster separator");
  }
  cur.take();

  const std::size_t expected =
      static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - cur.pos < expected) {
    throw CorruptData("truncated payload");
  }

  RasterImage img = RasterImage::zeros(width, height, channels);
  for (std::size_t i = 0; i < expected; ++i) {
    img.data[i] = bytes[cur.pos + i] / 255.0;
  }
  return img;
}

std::vector<std::uint8_t> encode_ppm(const RasterImage& img) {
  if (img.channels != 3) throw WrongChannelCount("PPM requires 3 channels");
  return encode_netpbm("P6", img.width, img.height, 3, img.data.data());
}

std::vector<std::uint8_t> encode_pgm(const RasterImage& img) {
  if (img.channels != 1) throw WrongChannelCount("PGM requires 1 channel");
  return encode_netpbm("P5", img.width, img.height, 1, img.data.data());
}

std::vector<std::uint8_t> encode_pgm(const Grid& map) {
  return encode_netpbm("P5", map.width, map.height, 1, map.data.data());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoFailure("read failed on " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("write failed on " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(text.data()),
                       text.size()));
}

RasterImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_image(bytes);
}

}  // namespace siqa
