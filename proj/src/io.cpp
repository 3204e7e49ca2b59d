#include "pucp/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace pucp {

static_assert(std::endian::native == std::endian::little,
              "field format assumes a little-endian host");

namespace {

constexpr char kMagic[5] = {'P', 'U', 'C', 'P', '1'};
constexpr uint8_t kVersion = 0x01;

struct Header {
  uint32_t n = 0;
  double domain_radius = 0, embed_side = 0, center_re = 0, center_im = 0;
  uint8_t dtype = 0;
};

void write_header(std::ofstream& os, const DiskGrid& g, uint8_t dtype) {
  os.write(kMagic, 5);
  os.put(static_cast<char>(kVersion));
  uint32_t n = static_cast<uint32_t>(g.n);
  os.write(reinterpret_cast<const char*>(&n), 4);
  double vals[4] = {g.domain_radius, g.embed_side, g.center.real(), g.center.imag()};
  os.write(reinterpret_cast<const char*>(vals), sizeof vals);
  os.put(static_cast<char>(dtype));
}

Header read_header(std::ifstream& is, const std::string& path) {
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
    throw std::runtime_error("field read: bad magic in " + path);
  int version = is.get();
  if (version != kVersion)
    throw std::runtime_error("field read: unsupported version in " + path);
  Header h;
  is.read(reinterpret_cast<char*>(&h.n), 4);
  double vals[4];
  is.read(reinterpret_cast<char*>(vals), sizeof vals);
  h.domain_radius = vals[0];
  h.embed_side = vals[1];
  h.center_re = vals[2];
  h.center_im = vals[3];
  int dtype = is.get();
  if (!is) throw std::runtime_error("field read: truncated header in " + path);
  if (dtype != 0 && dtype != 1)
    throw std::runtime_error("field read: unknown dtype in " + path);
  h.dtype = static_cast<uint8_t>(dtype);
  return h;
}

DiskGrid grid_from_header(const Header& h) {
  return make_disk_grid(static_cast<int>(h.n), h.domain_radius, h.embed_side,
                        {h.center_re, h.center_im});
}

} // namespace

void write_field(const std::string& path, const RealField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("field write: cannot open " + path);
  write_header(os, f.grid, 0);
  os.write(reinterpret_cast<const char*>(f.samples.data()),
           static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
  if (!os) throw std::runtime_error("field write: short write to " + path);
}

void write_field(const std::string& path, const ComplexField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("field write: cannot open " + path);
  write_header(os, f.grid, 1);
  os.write(reinterpret_cast<const char*>(f.samples.data()),
           static_cast<std::streamsize>(f.samples.size() * 2 * sizeof(double)));
  if (!os) throw std::runtime_error("field write: short write to " + path);
}

RealField read_real_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("field read: cannot open " + path);
  Header h = read_header(is, path);
  if (h.dtype != 0) throw std::runtime_error("field read: dtype mismatch, expected real: " + path);
  RealField f(grid_from_header(h));
  is.read(reinterpret_cast<char*>(f.samples.data()),
          static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
  if (!is) throw std::runtime_error("field read: truncated samples in " + path);
  return f;
}

ComplexField read_complex_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("field read: cannot open " + path);
  Header h = read_header(is, path);
  if (h.dtype != 1)
    throw std::runtime_error("field read: dtype mismatch, expected complex: " + path);
  ComplexField f(grid_from_header(h));
  is.read(reinterpret_cast<char*>(f.samples.data()),
          static_cast<std::streamsize>(f.samples.size() * 2 * sizeof(double)));
  if (!is) throw std::runtime_error("field read: truncated samples in " + path);
  return f;
}

int peek_field_dtype(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("field read: cannot open " + path);
  Header h = read_header(is, path);
  return h.dtype;
}

} // namespace pucp
