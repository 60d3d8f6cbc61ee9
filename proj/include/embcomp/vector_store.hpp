#pragma once

// EVEC container (all integers little-endian):
//
//   "EVC1" | dtype u8 | flags u8 | dims u32 | rows u32 | id_block_len u32
//   | id block (UTF-8 ids joined by '\n', no trailing newline)
//   | calibration (flags bit0; int8 only): dims x (min f32, max f32)
//   | payload: rows x bytes_per_row(dtype, dims)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "embcomp/matrix.hpp"

namespace embcomp {

inline constexpr std::size_t kEvecHeaderBytes = 18;

using QrelSet = std::map<std::string, std::map<std::string, int>>;

struct DatasetManifest {
    std::string name;
    std::filesystem::path docs;
    std::filesystem::path queries;
    std::filesystem::path qrels;
    double token_count = 0;
};

std::vector<std::uint8_t> serialize_matrix(const QuantizedMatrix& m);
QuantizedMatrix deserialize_matrix(const std::vector<std::uint8_t>& bytes);

void write_matrix(const QuantizedMatrix& m, const std::filesystem::path& path);
void write_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path);

QuantizedMatrix read_matrix(const std::filesystem::path& path);

// read_matrix + require dtype f32.
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

// Lossless view conversions between f32 payloads and EmbeddingMatrix.
QuantizedMatrix to_quantized(const EmbeddingMatrix& m);
EmbeddingMatrix to_embeddings(const QuantizedMatrix& m);

// query_id<TAB>doc_id<TAB>grade per line. An optional first-line header
// ("query-id\tcorpus-id\tscore" style) is skipped.
QrelSet parse_qrels(const std::string& text);
QrelSet read_qrels(const std::filesystem::path& path);

// One JSON object per line with a string id and numeric array.
EmbeddingMatrix parse_jsonl(const std::string& text, const std::string& id_field,
                            const std::string& vector_field);
EmbeddingMatrix ingest_jsonl(const std::filesystem::path& path, const std::string& id_field,
                             const std::string& vector_field);

// Accepts a single object, an array of objects, or {"datasets": [...]}.
// Relative paths resolve against the manifest's directory.
std::vector<DatasetManifest> read_manifest(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace embcomp
