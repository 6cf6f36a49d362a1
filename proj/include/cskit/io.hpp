#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cskit/common.hpp"
#include "cskit/datagen.hpp"
#include "cskit/decoders.hpp"
#include "cskit/sketch.hpp"

namespace cskit {

/// Malformed or unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Dataset files. The format follows the extension: ".csv" is text (one point
// per line, comma separated); anything else is the binary layout
//   "CSKD" | u32 version = 1 | u64 N | u32 d | N*d float64, row-major
// with every integer and double little-endian.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

Dataset read_csv(std::istream& in);
void write_csv(const Dataset& data, std::ostream& out);
Dataset read_binary(std::istream& in);
void write_binary(const Dataset& data, std::ostream& out);

void save_labels(const std::vector<int>& labels, const std::filesystem::path& path);
/// "<dataset path>.labels.csv"
std::filesystem::path labels_path(const std::filesystem::path& dataset_path);

/// Self-contained sketch file: values plus the frequencies they were built with.
struct SketchFile {
  Sketch sketch;
  FrequencyMatrix freqs;
};

nlohmann::json sketch_to_json(const Sketch& s, const FrequencyMatrix& freqs);
SketchFile sketch_from_json(const nlohmann::json& j);
void save_sketch(const Sketch& s, const FrequencyMatrix& freqs, const std::filesystem::path& path);
SketchFile load_sketch(const std::filesystem::path& path);

nlohmann::json result_to_json(const DecoderResult& r);
DecoderResult result_from_json(const nlohmann::json& j);
void save_result(const DecoderResult& r, const std::filesystem::path& path);
DecoderResult load_result(const std::filesystem::path& path);

nlohmann::json search_to_json(const SearchConfig& s);

nlohmann::json gmm_to_json(const GmmSpec& spec);
GmmSpec gmm_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace cskit
