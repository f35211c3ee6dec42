#include "polyrom/snapshot_store.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "polyrom/errors.hpp"

namespace polyrom {

namespace {

constexpr char kMagic[] = "PODS1\n";
constexpr std::size_t kMagicLen = 6;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_f64(std::string& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

struct Reader {
  const std::string& s;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > s.size()) throw IoError("PODS1: truncated stream");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos++]))
           << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos++]))
           << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string out = s.substr(pos, n);
    pos += n;
    return out;
  }
};

}  // namespace

std::string encode_store(const NamedMatrices& entries) {
  std::string out(kMagic, kMagicLen);
  for (const auto& [name, mat] : entries) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u64(out, static_cast<std::uint64_t>(mat.rows()));
    put_u64(out, static_cast<std::uint64_t>(mat.cols()));
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
      for (Eigen::Index c = 0; c < mat.cols(); ++c) put_f64(out, mat(r, c));
  }
  return out;
}

NamedMatrices decode_store(const std::string& bytes) {
  if (bytes.size() < kMagicLen ||
      std::memcmp(bytes.data(), kMagic, kMagicLen) != 0)
    throw IoError("PODS1: bad magic");
  Reader rd{bytes, kMagicLen};
  NamedMatrices out;
  while (rd.pos < bytes.size()) {
    const std::uint32_t name_len = rd.u32();
    std::string name = rd.bytes(name_len);
    const std::uint64_t rows = rd.u64();
    const std::uint64_t cols = rd.u64();
    const std::uint64_t remaining = bytes.size() - rd.pos;
    if (rows > 0 && cols > remaining / 8 / rows)
      throw IoError("PODS1: truncated payload for '" + name + "'");
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
    for (std::uint64_t r = 0; r < rows; ++r)
      for (std::uint64_t c = 0; c < cols; ++c)
        mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rd.f64();
    out.emplace_back(std::move(name), std::move(mat));
  }
  return out;
}

void write_store(const std::string& path, const NamedMatrices& entries) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  const std::string bytes = encode_store(entries);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path);
}

NamedMatrices read_store(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return decode_store(bytes);
}

const Eigen::MatrixXd& store_get(const NamedMatrices& entries,
                                 const std::string& name) {
  for (const auto& [n, m] : entries)
    if (n == name) return m;
  throw IoError("PODS1: missing entry '" + name + "'");
}

}  // namespace polyrom
