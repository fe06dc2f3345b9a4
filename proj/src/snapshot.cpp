#include "klandau/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "klandau/error.hpp"

namespace klandau {

namespace {

template <class T>
void put(std::vector<unsigned char>& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) throw Error("unexpected end of snapshot");
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) bits |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += sizeof(T);
    T value;
    if constexpr (sizeof(T) == 4) {
      const auto narrow = static_cast<std::uint32_t>(bits);
      std::memcpy(&value, &narrow, 4);
    } else {
      std::memcpy(&value, &bits, 8);
    }
    return value;
  }

  void skip(std::size_t k) { pos_ += k; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_snapshot(const SystemState& state) {
  std::vector<unsigned char> out;
  out.reserve(24 + 24 * state.size());
  out.insert(out.end(), std::begin(kSnapshotMagic), std::end(kSnapshotMagic));
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint64_t>(out, state.size());
  put<double>(out, state.time);
  for (const Vec3& v : state.velocities) {
    put<double>(out, v.x);
    put<double>(out, v.y);
    put<double>(out, v.z);
  }
  return out;
}

SystemState decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4) throw Error("unexpected end of snapshot");
  if (std::memcmp(bytes.data(), kSnapshotMagic, 4) != 0) throw Error("bad snapshot magic (expected KLND)");
  Reader r(bytes);
  r.skip(4);
  const auto version = r.get<std::uint32_t>();
  if (version != kSnapshotVersion) throw Error("unsupported snapshot version " + std::to_string(version));
  const auto n = r.get<std::uint64_t>();
  SystemState s;
  s.time = r.get<double>();
  if (n > r.remaining() / 24) throw Error("unexpected end of snapshot");
  s.velocities.resize(n);
  for (Vec3& v : s.velocities) {
    v.x = r.get<double>();
    v.y = r.get<double>();
    v.z = r.get<double>();
  }
  if (r.remaining() != 0) throw Error("trailing bytes after snapshot");
  return s;
}

void write_snapshot(const SystemState& state, const std::string& path) {
  const auto bytes = encode_snapshot(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write snapshot '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write snapshot '" + path + "'");
}

SystemState read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace klandau
