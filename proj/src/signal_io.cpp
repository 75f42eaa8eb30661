#include <cstdio>
#include <cstring>
#include <fstream>

#include "inrbench/errors.hpp"
#include "inrbench/signal.hpp"

namespace inrb {

namespace {

void put_u32le(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32le(std::istream& is, long& off) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("truncated container (u32)", off);
  off += 4;
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f32le(std::ostream& os, float f) {
  uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32le(os, v);
}

float get_f32le(std::istream& is, long& off) {
  uint32_t v = get_u32le(is, off);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

}  // namespace

void save_signal(const SampledSignal& s, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  os.write("INRB", 4);
  const unsigned char hdr[3] = {1, static_cast<unsigned char>(s.dim),
                                static_cast<unsigned char>(s.channels)};
  os.write(reinterpret_cast<const char*>(hdr), 3);
  for (int64_t r : s.resolution) put_u32le(os, static_cast<uint32_t>(r));
  for (double v : s.values) put_f32le(os, static_cast<float>(v));
  if (!os) throw IoError("write failure: " + path);
}

SampledSignal load_signal(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  long off = 0;
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "INRB", 4) != 0) throw IoError("bad magic", 0);
  off = 4;
  unsigned char hdr[3];
  is.read(reinterpret_cast<char*>(hdr), 3);
  if (!is) throw IoError("truncated header", off);
  off += 3;
  if (hdr[0] != 1) throw IoError("unsupported container version", 4);
  SampledSignal s;
  s.dim = hdr[1];
  s.channels = hdr[2];
  if (s.dim != 2 && s.dim != 3) throw IoError("bad dim", 5);
  if (s.channels != 1 && s.channels != 3) throw IoError("bad channel count", 6);
  s.resolution.resize(static_cast<size_t>(s.dim));
  for (int a = 0; a < s.dim; ++a) s.resolution[a] = get_u32le(is, off);
  const int64_t n = s.value_count();
  s.values.resize(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) s.values[static_cast<size_t>(i)] = get_f32le(is, off);
  return s;
}

namespace {

int pnm_token(std::istream& is, long& off) {
  // skips whitespace and '#' comments, returns a nonnegative integer
  int c = is.get();
  ++off;
  while (is) {
    if (c == '#') {
      while (is && c != '\n') {
        c = is.get();
        ++off;
      }
    } else if (std::isspace(c)) {
      c = is.get();
      ++off;
    } else {
      break;
    }
  }
  if (!is || !std::isdigit(c)) throw IoError("malformed PNM header", off - 1);
  int v = 0;
  while (is && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    c = is.get();
    ++off;
  }
  return v;
}

}  // namespace

SampledSignal load_raster(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  long off = 0;
  char m0 = static_cast<char>(is.get());
  char m1 = static_cast<char>(is.get());
  off = 2;
  if (!is || m0 != 'P' || (m1 != '5' && m1 != '6'))
    throw IoError("unsupported raster format (want PGM P5 or PPM P6)", 0);
  const int channels = (m1 == '6') ? 3 : 1;
  const int w = pnm_token(is, off);
  const int h = pnm_token(is, off);
  const int maxval = pnm_token(is, off);
  if (maxval <= 0 || maxval > 65535) throw IoError("bad maxval", off);
  SampledSignal s;
  s.dim = 2;
  s.resolution = {h, w};
  s.channels = channels;
  const int64_t n = static_cast<int64_t>(w) * h * channels;
  s.values.resize(static_cast<size_t>(n));
  const double scale = 1.0 / static_cast<double>(maxval);
  if (maxval < 256) {
    std::vector<unsigned char> buf(static_cast<size_t>(n));
    is.read(reinterpret_cast<char*>(buf.data()), n);
    if (!is) throw IoError("truncated raster data", off);
    for (int64_t i = 0; i < n; ++i)
      s.values[static_cast<size_t>(i)] = buf[static_cast<size_t>(i)] * scale;
  } else {
    std::vector<unsigned char> buf(static_cast<size_t>(2 * n));
    is.read(reinterpret_cast<char*>(buf.data()), 2 * n);
    if (!is) throw IoError("truncated raster data", off);
    for (int64_t i = 0; i < n; ++i) {
      const int v = (buf[static_cast<size_t>(2 * i)] << 8) | buf[static_cast<size_t>(2 * i + 1)];
      s.values[static_cast<size_t>(i)] = v * scale;
    }
  }
  return s;
}

void save_pgm(const SampledSignal& s, const std::string& path) {
  if (s.dim != 2 || s.channels != 1) throw BuildError("save_pgm: 2D single-channel only");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  os << "P5\n" << s.resolution[1] << " " << s.resolution[0] << "\n255\n";
  for (double v : s.values) {
    double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    os.put(static_cast<char>(static_cast<int>(c * 255.0 + 0.5)));
  }
}

void save_ppm_rgb(const std::vector<uint8_t>& rgb, int64_t w, int64_t h,
                  const std::string& path) {
  if (static_cast<int64_t>(rgb.size()) != w * h * 3) throw BuildError("save_ppm_rgb: size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  os << "P6\n" << w << " " << h << "\n255\n";
  os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

}  // namespace inrb
