#include "wavden/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace wavden {

namespace {

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; i++) out.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& out, uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char(v >> 8));
}

struct Reader {
  const unsigned char* p;
  size_t n, pos = 0;
  std::string path;

  void need(size_t k) {
    if (pos + k > n)
      fail("io.format", path + ": truncated checkpoint at byte offset " + std::to_string(pos));
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; i++) v |= uint32_t(p[pos + size_t(i)]) << (8 * i);
    pos += 4;
    return v;
  }
  uint16_t u16() {
    need(2);
    const uint16_t v = uint16_t(p[pos]) | uint16_t(p[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  uint8_t u8() {
    need(1);
    return p[pos++];
  }
  std::string bytes(size_t k) {
    need(k);
    std::string s(reinterpret_cast<const char*>(p + pos), k);
    pos += k;
    return s;
  }
};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string out;
  out += "WCKP";
  put_u32(out, uint32_t(ckpt.tensors.count()));
  for (size_t i = 0; i < ckpt.tensors.count(); i++) {
    const std::string& name = ckpt.tensors.names[i];
    const auto& t = ckpt.tensors.tensors[i];
    if (name.size() > 0xffff) fail("io.format", "tensor name too long");
    put_u16(out, uint16_t(name.size()));
    out += name;
    if (t.shape.size() > 0xff) fail("io.format", "tensor rank too large");
    out.push_back(char(t.shape.size()));
    for (const int d : t.shape) put_u32(out, uint32_t(d));
    const size_t base = out.size();
    out.resize(base + t.data.size() * 4);
    std::memcpy(out.data() + base, t.data.data(), t.data.size() * 4);
  }
  put_u32(out, uint32_t(ckpt.config_text.size()));
  out += ckpt.config_text;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail("io.not_found", "cannot create " + tmp);
    f.write(out.data(), std::streamsize(out.size()));
    if (!f) fail("io.format", "short write on " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail("io.format", "rename " + tmp + " -> " + path + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io.not_found", "cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r{reinterpret_cast<const unsigned char*>(buf.data()), buf.size(), 0, path};
  if (r.bytes(4) != "WCKP") fail("io.format", path + ": bad magic at byte offset 0");

  Checkpoint ckpt;
  const uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; i++) {
    const std::string name = r.bytes(r.u16());
    const int rank = r.u8();
    std::vector<int> shape(size_t(rank), 0);
    for (int d = 0; d < rank; d++) shape[size_t(d)] = int(r.u32());
    auto& t = ckpt.tensors.add(name, shape);
    const size_t bytes = t.data.size() * 4;
    r.need(bytes);
    std::memcpy(t.data.data(), r.p + r.pos, bytes);
    r.pos += bytes;
  }
  ckpt.config_text = r.bytes(r.u32());
  if (r.pos != r.n)
    fail("io.format", path + ": trailing bytes at offset " + std::to_string(r.pos));
  return ckpt;
}

}  // namespace wavden
