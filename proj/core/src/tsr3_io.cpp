#include "tscaledgd/tsr3.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

namespace tsgd {

namespace {

constexpr std::array<char, 4> kMagic{'T', 'S', 'R', '3'};

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(b.data(), b.size());
}

std::uint64_t get_bytes(std::istream& in, int count) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), count);
  if (!in) throw Error(Errc::kIoError, "truncated TSR3 stream");
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

std::uint32_t checked_dim(Index n) {
  if (n < 0 || static_cast<std::uint64_t>(n) > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::kIoError, "dimension does not fit in u32");
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace

void write_tsr3(std::ostream& out, const Tensor3& a) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, checked_dim(a.n1()));
  put_u32(out, checked_dim(a.n2()));
  put_u32(out, checked_dim(a.n3()));
  for (Index k = 0; k < a.n3(); ++k) {
    for (Index i = 0; i < a.n1(); ++i) {
      for (Index j = 0; j < a.n2(); ++j) put_f64(out, a(i, j, k));
    }
  }
  if (!out) throw Error(Errc::kIoError, "failed writing TSR3 stream");
}

Tensor3 read_tsr3(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(Errc::kIoError, "missing TSR3 magic");
  const auto n1 = static_cast<Index>(get_bytes(in, 4));
  const auto n2 = static_cast<Index>(get_bytes(in, 4));
  const auto n3 = static_cast<Index>(get_bytes(in, 4));
  Tensor3 a(n1, n2, n3);
  for (Index k = 0; k < n3; ++k) {
    for (Index i = 0; i < n1; ++i) {
      for (Index j = 0; j < n2; ++j) a(i, j, k) = std::bit_cast<double>(get_bytes(in, 8));
    }
  }
  return a;
}

void write_tsr3(const std::filesystem::path& path, const Tensor3& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot open " + path.string() + " for writing");
  write_tsr3(out, a);
}

Tensor3 read_tsr3(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  return read_tsr3(in);
}

}  // namespace tsgd
