#include "lapf/model_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lapf {

std::string_view to_string(HeadKind h) { return h == HeadKind::softmax ? "softmax" : "sigmoid_scaled"; }

HeadKind parse_head_kind(std::string_view s) {
  if (s == "softmax") return HeadKind::softmax;
  if (s == "sigmoid_scaled") return HeadKind::sigmoid_scaled;
  throw ConfigError("unknown head kind '" + std::string(s) + "'");
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

void write_model(const ModelFile& file, std::ostream& out) {
  file.model.validate();
  out << "lapf-mlp 1\n";
  out << "head " << to_string(file.model.head) << '\n';
  out << "output_scale " << format_real(file.model.output_scale) << '\n';
  out << "embedder " << to_string(file.embedder) << '\n';
  out << "dim " << file.dim << '\n';
  out << "seed " << file.seed << '\n';
  out << "layers";
  for (Index s : file.model.sizes()) out << ' ' << s;
  out << '\n';
  for (const auto& [k, v] : file.meta) {
    if (k.find_first_of(" \t\r\n") != std::string::npos || v.find_first_of("\r\n") != std::string::npos)
      throw ConfigError("model metadata must be single-line and the key space-free");
    out << "meta " << k << ' ' << v << '\n';
  }
  out << "weights\n";
  for (const auto& l : file.model.layers) {
    for (Index r = 0; r < l.weight.rows(); ++r) {
      for (Index c = 0; c < l.weight.cols(); ++c) out << (c ? " " : "") << format_real(l.weight(r, c));
      out << '\n';
    }
    for (Index r = 0; r < l.bias.size(); ++r) out << (r ? " " : "") << format_real(l.bias(r));
    out << '\n';
  }
}

ModelFile read_model(std::istream& in) {
  ModelFile f;
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError(lineno + 1, "unexpected end of model file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next_line() != "lapf-mlp 1") throw ParseError(lineno, "not a model file");

  std::vector<Index> sizes;
  HeadKind head = HeadKind::softmax;
  double scale = 5.0;
  while (next_line() != "weights") {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    try {
      if (key == "head") {
        std::string v;
        ss >> v;
        head = parse_head_kind(v);
      } else if (key == "output_scale") {
        std::string v;
        ss >> v;
        scale = parse_real(v);
      } else if (key == "embedder") {
        std::string v;
        ss >> v;
        f.embedder = parse_embedder_kind(v);
      } else if (key == "dim") {
        ss >> f.dim;
      } else if (key == "seed") {
        ss >> f.seed;
      } else if (key == "layers") {
        Index s;
        while (ss >> s) sizes.push_back(s);
      } else if (key == "meta") {
        std::string k, v;
        ss >> k;
        std::getline(ss >> std::ws, v);
        f.meta[k] = v;
      } else {
        throw ParseError(lineno, "unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
    if (ss.fail() && key != "layers" && key != "meta") throw ParseError(lineno, "bad value for '" + key + "'");
  }
  f.model = zero_mlp<double>(sizes, head, scale);

  auto read_row = [&](auto&& row, Index expected) {
    std::istringstream ss(next_line());
    std::string tok;
    Index k = 0;
    while (ss >> tok) {
      if (k >= expected) throw ParseError(lineno, "too many values");
      try {
        row(k++) = parse_real(tok);
      } catch (const ConfigError& e) {
        throw ParseError(lineno, e.what());
      }
    }
    if (k != expected) throw ParseError(lineno, "expected " + std::to_string(expected) + " values");
  };
  for (auto& l : f.model.layers) {
    for (Index r = 0; r < l.weight.rows(); ++r) read_row(l.weight.row(r), l.weight.cols());
    read_row(l.bias, l.bias.size());
  }
  f.model.validate();
  return f;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  write_model(file, out);
  if (!out) throw Error("failed writing model file " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace lapf
