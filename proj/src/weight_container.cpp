#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "relocnet/errors.hpp"
#include "relocnet/model.hpp"

namespace relocnet {

// File layout:
//   "RELOCNETWC v1\n"
//   uint64 LE: manifest byte length
//   manifest (JSON): arch name, provenance, channel means, dtype, array
//     table {name, shape, offset (elements into blob)}, fnv1a64 blob checksum
//   blob: concatenated little-endian float64 arrays
namespace {

constexpr char kMagic[] = "RELOCNETWC v1\n";

std::uint64_t fnv1a_bytes(const void* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void WeightContainer::save(const std::string& path) const {
  nlohmann::json manifest;
  manifest["arch"] = arch_name;
  manifest["provenance"] = provenance;
  manifest["channel_means"] = channel_means;
  manifest["dtype"] = "f64";
  std::vector<double> blob;
  for (const auto& [name, t] : arrays) {
    nlohmann::json entry;
    entry["name"] = name;
    entry["shape"] = t.shape();
    entry["offset"] = blob.size();
    manifest["arrays"].push_back(entry);
    blob.insert(blob.end(), t.data(), t.data() + t.size());
  }
  manifest["checksum"] =
      fnv1a_bytes(blob.data(), blob.size() * sizeof(double));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IngestionError("cannot open for writing: " + path);
  f.write(kMagic, sizeof(kMagic) - 1);
  const std::string mtext = manifest.dump();
  const std::uint64_t mlen = mtext.size();
  f.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
  f.write(mtext.data(), std::streamsize(mtext.size()));
  f.write(reinterpret_cast<const char*>(blob.data()),
          std::streamsize(blob.size() * sizeof(double)));
  if (!f) throw IngestionError("write failed: " + path);
}

WeightContainer WeightContainer::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IngestionError("cannot open weight container: " + path);
  char magic[sizeof(kMagic) - 1];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw IngestionError("not a weight container: " + path);
  std::uint64_t mlen = 0;
  f.read(reinterpret_cast<char*>(&mlen), sizeof(mlen));
  if (!f || mlen > (1ull << 30))
    throw IngestionError("corrupt container manifest: " + path);
  std::string mtext(mlen, '\0');
  f.read(mtext.data(), std::streamsize(mlen));
  if (!f) throw IngestionError("truncated container manifest: " + path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(mtext);
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("corrupt container manifest: " + std::string(e.what()));
  }
  if (manifest.value("dtype", "f64") != std::string("f64"))
    throw IngestionError("unsupported container dtype");

  WeightContainer c;
  c.arch_name = manifest.value("arch", "");
  c.provenance = manifest.value("provenance", "");
  c.channel_means = manifest.value("channel_means", std::vector<double>{});

  std::vector<double> blob;
  {
    std::vector<char> raw((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
    if (raw.size() % sizeof(double) != 0)
      throw IngestionError("truncated container blob: " + path);
    blob.resize(raw.size() / sizeof(double));
    std::memcpy(blob.data(), raw.data(), raw.size());
  }
  const std::uint64_t expect = manifest.value("checksum", std::uint64_t(0));
  const std::uint64_t got =
      fnv1a_bytes(blob.data(), blob.size() * sizeof(double));
  if (expect != got)
    throw IngestionError("weight container checksum mismatch: " + path);

  if (manifest.contains("arrays")) {
    for (const auto& entry : manifest["arrays"]) {
      const auto name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      const auto offset = entry.at("offset").get<std::size_t>();
      const std::size_t n = Tensor::count(shape);
      if (offset + n > blob.size())
        throw IngestionError("container array out of bounds: " + name);
      c.arrays.emplace(name,
                       Tensor(shape, std::vector<double>(
                                         blob.begin() + long(offset),
                                         blob.begin() + long(offset + n))));
    }
  }
  return c;
}

}  // namespace relocnet
