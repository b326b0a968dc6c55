#include "hagcl/checkpoint.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <vector>

#include "hagcl/error.hpp"

namespace hagcl {

namespace {

constexpr char kMagic[8] = {'H', 'A', 'G', 'C', 'L', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("checkpoint load error: truncated file " + path);
  return v;
}

}  // namespace

void save_checkpoint(const ParamStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(store.size()));
  for (const auto& entry : store.entries()) {
    write_pod(out, static_cast<std::uint32_t>(entry.name.size()));
    out.write(entry.name.data(), static_cast<std::streamsize>(entry.name.size()));
    write_pod(out, static_cast<std::uint8_t>(entry.trainable ? 1 : 0));
    const Array& a = entry.value.data();
    write_pod(out, static_cast<std::uint32_t>(a.rank()));
    for (std::size_t d : a.shape()) write_pod(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(a.data()),
              static_cast<std::streamsize>(a.size() * sizeof(double)));
  }
  if (!out) throw DataError("checkpoint write failed: " + path);
}

void load_checkpoint_into(const std::string& path, ParamStore& store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 8, kMagic))
    throw DataError("checkpoint load error: bad magic in " + path);
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion)
    throw DataError("checkpoint load error: unsupported version " + std::to_string(version));
  const auto count = read_pod<std::uint64_t>(in, path);
  if (count != store.size())
    throw ShapeError("checkpoint: expected " + std::to_string(store.size()) +
                     " parameters, found " + std::to_string(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw DataError("checkpoint load error: truncated file " + path);
    read_pod<std::uint8_t>(in, path);  // trainable flag; layout authority is the store
    const auto rank = read_pod<std::uint32_t>(in, path);
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(read_pod<std::uint64_t>(in, path));
      total *= d;
    }
    if (!store.contains(name))
      throw ShapeError("checkpoint: parameter '" + name + "' not expected by this model");
    Value v = store.get(name);
    if (v.data().shape() != shape)
      throw ShapeError("checkpoint: parameter '" + name + "' expected shape " +
                       v.data().shape_str() + ", found " + Array(shape).shape_str());
    in.read(reinterpret_cast<char*>(v.mutable_data().data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw DataError("checkpoint load error: truncated file " + path);
  }
}

}  // namespace hagcl
