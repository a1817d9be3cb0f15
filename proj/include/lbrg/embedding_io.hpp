#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lbrg/corpus.hpp"

namespace lbrg {

// Binary embedding file layout (all integers and floats little-endian):
//   magic "LBRG" | format version u32 | record count u64 | d_r u32 | d_c u32
//   per record: id length u16 | UTF-8 id bytes | d_r floats | d_c floats
inline constexpr char kEmbeddingMagic[4] = {'L', 'B', 'R', 'G'};
inline constexpr uint32_t kEmbeddingFormatVersion = 1;

struct EmbeddingFile {
  uint32_t retrieval_dim = 0;
  uint32_t classifier_dim = 0;
  std::vector<EmbeddingRecord> records;
};

EmbeddingFile read_embedding_file(const std::filesystem::path& path);

void write_embedding_file(const std::filesystem::path& path,
                          const EmbeddingFile& file);

}  // namespace lbrg
