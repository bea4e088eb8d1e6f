#pragma once

#include "lapf/embedding.hpp"
#include "lapf/mlp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace lapf {

/// A trained network plus what is needed to reproduce its inputs.
///
/// Text format:
///   lapf-mlp 1
///   head softmax|sigmoid_scaled
///   output_scale <real>
///   embedder hashing|remote
///   dim <int>
///   seed <int>
///   layers <in> <hidden...> <out>
///   meta <key> <value>        (zero or more)
///   weights
///   one line per weight-matrix row, then one line for the bias, per layer
/// Reals are written in shortest round-trip form, so save/load is lossless.
struct ModelFile {
  Mlp model;
  EmbedderKind embedder = EmbedderKind::hashing;
  int dim = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;
};

void write_model(const ModelFile& file, std::ostream& out);
ModelFile read_model(std::istream& in);
void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);
double parse_real(std::string_view s);

}  // namespace lapf
