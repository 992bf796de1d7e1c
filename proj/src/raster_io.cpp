#include "wavden/raster_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace wavden {

namespace {

uint32_t le32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

void put_le32(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io.not_found", "cannot open " + path);
  in.seekg(0, std::ios::end);
  const size_t n = size_t(in.tellg());
  in.seekg(0);
  std::vector<unsigned char> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), n);
  if (!in) fail("io.format", "short read on " + path);
  return buf;
}

MultiBandRaster parse_wcr(const std::vector<unsigned char>& buf, const std::string& path) {
  if (buf.size() < 20) fail("io.format", path + ": truncated WCR header at byte offset " + std::to_string(buf.size()));
  const uint32_t w = le32(buf.data() + 4);
  const uint32_t h = le32(buf.data() + 8);
  const uint32_t b = le32(buf.data() + 12);
  const uint32_t reserved = le32(buf.data() + 16);
  if (reserved != 0) fail("io.format", path + ": nonzero reserved field at byte offset 16");
  if (w < 1 || h < 1 || (b != 1 && b != 3 && b != 4))
    fail("io.dimension", path + ": bad dimensions " + std::to_string(w) + "x" + std::to_string(h) +
                             "x" + std::to_string(b));
  const size_t count = size_t(w) * h * b;
  if (buf.size() != 20 + count * 4)
    fail("io.dimension", path + ": payload size " + std::to_string(buf.size() - 20) +
                             " does not match header (expect " + std::to_string(count * 4) + ")");
  MultiBandRaster r{int(w), int(h), int(b)};
  static_assert(sizeof(float) == 4);
  // Little-endian host assumed for the f32 payload.
  std::memcpy(r.samples.data(), buf.data() + 20, count * 4);
  return r;
}

MultiBandRaster parse_pgm(const std::vector<unsigned char>& buf, const std::string& path) {
  size_t pos = 2;  // past "P5"
  auto skip_space = [&] {
    while (pos < buf.size()) {
      if (buf[pos] == '#') {
        while (pos < buf.size() && buf[pos] != '\n') pos++;
      } else if (std::isspace(buf[pos])) {
        pos++;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space();
    const size_t start = pos;
    long v = 0;
    while (pos < buf.size() && std::isdigit(buf[pos])) v = v * 10 + (buf[pos++] - '0');
    if (pos == start) fail("io.format", path + ": expected integer at byte offset " + std::to_string(pos));
    return v;
  };
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (pos >= buf.size() || !std::isspace(buf[pos]))
    fail("io.format", path + ": missing whitespace after maxval at byte offset " + std::to_string(pos));
  pos++;  // single whitespace before payload
  if (w < 1 || h < 1) fail("io.dimension", path + ": bad PGM dimensions");
  if (maxval < 256 || maxval > 65535)
    fail("io.format", path + ": maxval " + std::to_string(maxval) + " is not 16-bit at byte offset " +
                          std::to_string(pos));
  const size_t count = size_t(w) * h;
  if (buf.size() - pos != count * 2)
    fail("io.dimension", path + ": payload size " + std::to_string(buf.size() - pos) +
                             " does not match header (expect " + std::to_string(count * 2) + ")");
  MultiBandRaster r{int(w), int(h), 1};
  for (size_t i = 0; i < count; i++) {
    // Big-endian per the PGM spec for maxval > 255.
    const uint16_t v = uint16_t(buf[pos + 2 * i]) << 8 | uint16_t(buf[pos + 2 * i + 1]);
    r.samples[i] = float(v);
  }
  return r;
}

}  // namespace

MultiBandRaster read_raster(const std::string& path) {
  const auto buf = slurp(path);
  if (buf.size() >= 4 && std::memcmp(buf.data(), "WCR1", 4) == 0) return parse_wcr(buf, path);
  if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '5') return parse_pgm(buf, path);
  fail("io.format", path + ": unknown magic at byte offset 0");
}

void write_raster(const MultiBandRaster& raster, const std::string& path, RasterFormat format) {
  if (raster.samples.size() != size_t(raster.width) * raster.height * raster.bands)
    fail("io.dimension", "sample count does not match declared dimensions");
  std::vector<unsigned char> out;
  if (format == RasterFormat::WCR) {
    out.reserve(20 + raster.samples.size() * 4);
    out.insert(out.end(), {'W', 'C', 'R', '1'});
    put_le32(out, uint32_t(raster.width));
    put_le32(out, uint32_t(raster.height));
    put_le32(out, uint32_t(raster.bands));
    put_le32(out, 0);
    const size_t base = out.size();
    out.resize(base + raster.samples.size() * 4);
    std::memcpy(out.data() + base, raster.samples.data(), raster.samples.size() * 4);
  } else {
    if (raster.bands != 1) fail("io.unsupported", "PGM16 requires a single band");
    char header[64];
    std::snprintf(header, sizeof(header), "P5\n%d %d\n65535\n", raster.width, raster.height);
    out.insert(out.end(), header, header + std::strlen(header));
    for (const float s : raster.samples) {
      if (!(s >= 0.0f && s <= 65535.0f))
        fail("io.range", "sample " + std::to_string(s) + " outside [0, 65535] for PGM16");
      const uint16_t v = uint16_t(std::lround(s));
      out.push_back(v >> 8);
      out.push_back(v & 0xff);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail("io.not_found", "cannot create " + path);
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
  if (!f) fail("io.format", "short write on " + path);
}

void write_raster_atomic(const MultiBandRaster& raster, const std::string& path,
                         RasterFormat format) {
  const std::string tmp = path + ".tmp";
  write_raster(raster, tmp, format);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail("io.format", "rename " + tmp + " -> " + path + ": " + ec.message());
}

Plane read_plane(const std::string& path) {
  MultiBandRaster r = read_raster(path);
  if (r.bands != 1) fail("io.dimension", path + ": expected a single-band raster");
  Plane p(r.width, r.height);
  p.samples = std::move(r.samples);
  return p;
}

void write_plane(const Plane& plane, const std::string& path) {
  MultiBandRaster r(plane.width, plane.height, 1);
  r.samples = plane.samples;
  write_raster_atomic(r, path, RasterFormat::WCR);
}

}  // namespace wavden
