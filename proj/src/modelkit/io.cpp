#include "rtms/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rtms {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary field formats assume a little-endian host");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    path_ = path.string();
  }
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed for '" + path_ + "'");
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path.string() + "'");
    path_ = path.string();
  }
  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw IoError("truncated file '" + path_ + "'");
    return v;
  }
  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_) throw IoError("truncated file '" + path_ + "'");
  }
  void expect_magic(const char* magic) {
    std::array<char, 4> m{};
    bytes(m.data(), 4);
    if (std::memcmp(m.data(), magic, 4) != 0)
      throw IoError("'" + path_ + "' is not a " + std::string(magic, 4) + " file");
  }
  void expect_end() {
    in_.peek();
    if (!in_.eof()) throw IoError("trailing bytes in '" + path_ + "'");
  }

 private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& f) {
  const Grid2D& g = f.grid();
  Writer w(path);
  w.bytes("RTMF", 4);
  w.put<std::uint32_t>(kFieldFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nx1()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nx2()));
  w.put<double>(g.dx());
  w.put<double>(g.origin().x1);
  w.put<double>(g.origin().x2);
  w.bytes(reinterpret_cast<const char*>(f.data().data()), f.size() * sizeof(double));
  w.finish();
}

ScalarField read_field(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("RTMF");
  const auto version = r.get<std::uint32_t>();
  if (version != kFieldFormatVersion)
    throw IoError("unsupported field format version " + std::to_string(version));
  const auto nx1 = r.get<std::uint32_t>();
  const auto nx2 = r.get<std::uint32_t>();
  const double dx = r.get<double>();
  const double o1 = r.get<double>();
  const double o2 = r.get<double>();
  ScalarField f(Grid2D(nx1, nx2, dx, {o1, o2}));
  r.bytes(reinterpret_cast<char*>(f.data().data()), f.size() * sizeof(double));
  r.expect_end();
  if (!all_finite(f.values())) throw IoError("non-finite values in '" + path.string() + "'");
  return f;
}

void write_mask(const std::filesystem::path& path, const MaskField& m) {
  ScalarField f(m.grid());
  for (std::size_t k = 0; k < m.size(); ++k) f[k] = m[k] ? 1.0 : 0.0;
  write_field(path, f);
}

void write_gather(const std::filesystem::path& path, const SurfaceGather& g) {
  if (g.data.size() != g.nt * g.nrec) throw GeometryError("gather data size mismatch");
  Writer w(path);
  w.bytes("RTMG", 4);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nt));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.nrec));
  w.put<double>(g.dt);
  w.put<double>(g.x1_first);
  w.put<double>(g.dx_rec);
  w.bytes(reinterpret_cast<const char*>(g.data.data()), g.data.size() * sizeof(double));
  w.finish();
}

SurfaceGather read_gather(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("RTMG");
  const auto nt = r.get<std::uint32_t>();
  const auto nrec = r.get<std::uint32_t>();
  const double dt = r.get<double>();
  const double x0 = r.get<double>();
  const double dxr = r.get<double>();
  SurfaceGather g(nt, nrec, dt, x0, dxr);
  r.bytes(reinterpret_cast<char*>(g.data.data()), g.data.size() * sizeof(double));
  r.expect_end();
  return g;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::uint64_t h = 1469598103934665603ull;
  std::array<char, 65536> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    const auto n = in.gcount();
    for (std::streamsize k = 0; k < n; ++k) {
      h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(k)]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace rtms
