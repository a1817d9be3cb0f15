#include "lbrg/embedding_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "lbrg/error.hpp"

namespace lbrg {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms unsupported");
static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

template <typename T>
T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  value = byteswap_if_big(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::filesystem::path& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw Error(ErrorKind::schema,
                "truncated embedding file: " + path.string());
  }
  return byteswap_if_big(value);
}

void read_floats(std::istream& in, std::vector<float>& out, uint32_t n,
                 const std::filesystem::path& path, const std::string& id) {
  out.resize(n);
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(n) * 4);
  if (!in) {
    throw Error(ErrorKind::schema,
                "truncated embedding record '" + id + "' in " + path.string());
  }
  for (float& v : out) {
    v = byteswap_if_big(v);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::schema, "non-finite embedding component in '" +
                                         id + "' (" + path.string() + ")");
    }
  }
}

}  // namespace

EmbeddingFile read_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::missing_file,
                "cannot open embedding file: " + path.string());
  }

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kEmbeddingMagic, 4) != 0) {
    throw Error(ErrorKind::schema,
                "bad magic in embedding file: " + path.string());
  }
  const auto version = read_le<uint32_t>(in, path);
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorKind::schema,
                "unsupported embedding format version " +
                    std::to_string(version) + " in " + path.string());
  }

  EmbeddingFile file;
  const auto count = read_le<uint64_t>(in, path);
  file.retrieval_dim = read_le<uint32_t>(in, path);
  file.classifier_dim = read_le<uint32_t>(in, path);

  file.records.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    EmbeddingRecord rec;
    const auto id_len = read_le<uint16_t>(in, path);
    rec.study_id.resize(id_len);
    in.read(rec.study_id.data(), id_len);
    if (!in) {
      throw Error(ErrorKind::schema,
                  "truncated embedding file: " + path.string());
    }
    read_floats(in, rec.retrieval_vec, file.retrieval_dim, path, rec.study_id);
    read_floats(in, rec.classifier_vec, file.classifier_dim, path,
                rec.study_id);
    file.records.push_back(std::move(rec));
  }
  return file;
}

void write_embedding_file(const std::filesystem::path& path,
                          const EmbeddingFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io, "cannot write embedding file: " + path.string());
  }
  out.write(kEmbeddingMagic, 4);
  write_le<uint32_t>(out, kEmbeddingFormatVersion);
  write_le<uint64_t>(out, file.records.size());
  write_le<uint32_t>(out, file.retrieval_dim);
  write_le<uint32_t>(out, file.classifier_dim);

  for (const auto& rec : file.records) {
    if (rec.retrieval_vec.size() != file.retrieval_dim ||
        rec.classifier_vec.size() != file.classifier_dim) {
      throw Error(ErrorKind::dimension_mismatch,
                  "embedding record '" + rec.study_id +
                      "' does not match header dimensions");
    }
    if (rec.study_id.size() > std::numeric_limits<uint16_t>::max()) {
      throw Error(ErrorKind::schema,
                  "study id too long for embedding format: " + rec.study_id);
    }
    write_le<uint16_t>(out, static_cast<uint16_t>(rec.study_id.size()));
    out.write(rec.study_id.data(),
              static_cast<std::streamsize>(rec.study_id.size()));
    for (float v : rec.retrieval_vec) write_le<float>(out, v);
    for (float v : rec.classifier_vec) write_le<float>(out, v);
  }
  if (!out) {
    throw Error(ErrorKind::io, "short write to " + path.string());
  }
}

}  // namespace lbrg
