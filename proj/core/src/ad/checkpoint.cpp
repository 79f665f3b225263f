// SPDX-License-Identifier: Apache-2.0
#include "rismarl/ad/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rismarl/common.hpp"

namespace rismarl::ad {

namespace {

constexpr char kMagic[8] = {'R', 'I', 'S', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
  return v;
}

}  // namespace

void save_checkpoint(const ParamStore& store, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, store.base_seed());
  put(out, static_cast<std::uint64_t>(store.size()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& p = store.at(i);
    put(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put(out, static_cast<std::uint8_t>(p.scheme));
    put(out, p.init_arg);
    put(out, p.seed);
    put(out, static_cast<std::int64_t>(p.value.rows()));
    put(out, static_cast<std::int64_t>(p.value.cols()));
    out.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(sizeof(double) * p.value.size()));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

ParamStore read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (get<std::uint32_t>(in, path) != kVersion) throw std::runtime_error("checkpoint: unsupported version in " + path);
  ParamStore store(get<std::uint64_t>(in, path));
  const auto count = get<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(in, path);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto scheme = get<std::uint8_t>(in, path);
    if (scheme > 2) throw std::runtime_error("checkpoint: bad init scheme in " + path);
    const auto arg = get<double>(in, path);
    const auto seed = get<std::uint64_t>(in, path);
    const auto rows = get<std::int64_t>(in, path);
    const auto cols = get<std::int64_t>(in, path);
    if (rows <= 0 || cols <= 0 || rows * cols > (1LL << 32)) throw std::runtime_error("checkpoint: bad shape in " + path);
    auto& p = store.add(name, static_cast<int>(rows), static_cast<int>(cols), InitScheme::Zeros);
    p.scheme = static_cast<InitScheme>(scheme);
    p.init_arg = arg;
    p.seed = seed;
    in.read(reinterpret_cast<char*>(p.value.data()), static_cast<std::streamsize>(sizeof(double) * p.value.size()));
    if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
  }
  return store;
}

void load_checkpoint(ParamStore& store, const std::string& path) {
  ParamStore loaded = read_checkpoint(path);
  require(loaded.size() == store.size(), "checkpoint: parameter count mismatch with " + path);
  for (std::size_t i = 0; i < store.size(); ++i) {
    require(loaded.at(i).name == store.at(i).name, "checkpoint: parameter order mismatch at " + store.at(i).name);
  }
  store.copy_values_from(loaded);
}

}  // namespace rismarl::ad
