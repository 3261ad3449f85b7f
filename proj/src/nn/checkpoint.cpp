#include "amplab/nn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "amplab/core/error.hpp"

namespace amplab::nn {

namespace {

constexpr int kVersion = 1;

void put_real(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

template <typename Vec>
void put_row(std::ostream& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    put_real(out, v(i));
  }
  out << '\n';
}

void expect_key(std::istream& in, const std::string& key) {
  std::string got;
  if (!(in >> got) || got != key) {
    throw SchemaError("model file: expected '" + key + "', found '" + got + "'");
  }
}

template <typename T>
T read_value(std::istream& in, const std::string& what) {
  T v{};
  if (!(in >> v)) throw SchemaError("model file: bad or missing " + what);
  return v;
}

double read_real(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw SchemaError("model file: truncated parameter block");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw SchemaError("model file: bad number '" + tok + "'");
  return v;
}

}  // namespace

void save_mlp(const Mlp& mlp, std::ostream& out) {
  out << "amplab-mlp " << kVersion << '\n';
  out << "input_dim " << mlp.spec.input_dim << '\n';
  out << "hidden";
  for (int w : mlp.spec.hidden_widths) out << ' ' << w;
  out << '\n';
  out << "output_dim " << mlp.spec.output_dim << '\n';
  out << "activation " << to_string(mlp.spec.activation) << '\n';
  out << "input_batchnorm " << (mlp.spec.input_batchnorm ? 1 : 0) << '\n';
  out << "seed " << mlp.seed << '\n';
  out << "input_transform " << mlp.input.shift.size() << '\n';
  if (!mlp.input.identity()) {
    put_row(out, mlp.input.shift);
    put_row(out, mlp.input.scale);
  }
  for (std::size_t k = 0; k < mlp.params.layers.size(); ++k) {
    const auto& l = mlp.params.layers[k];
    out << "layer " << k << ' ' << l.weight.rows() << ' ' << l.weight.cols() << '\n';
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) put_row(out, l.weight.row(r));
    put_row(out, l.bias);
  }
}

void save_mlp(const Mlp& mlp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_mlp(mlp, out);
  if (!out) throw IoError("write failed for " + path.string());
}

Mlp load_mlp(std::istream& in) {
  expect_key(in, "amplab-mlp");
  const int version = read_value<int>(in, "version");
  if (version != kVersion) {
    throw SchemaError("model file: unsupported version " + std::to_string(version));
  }
  MlpSpec spec;
  expect_key(in, "input_dim");
  spec.input_dim = read_value<int>(in, "input_dim");
  expect_key(in, "hidden");
  {
    std::string line;
    std::getline(in, line);
    std::istringstream ss(line);
    int w;
    while (ss >> w) spec.hidden_widths.push_back(w);
  }
  expect_key(in, "output_dim");
  spec.output_dim = read_value<int>(in, "output_dim");
  expect_key(in, "activation");
  spec.activation = parse_activation(read_value<std::string>(in, "activation"));
  expect_key(in, "input_batchnorm");
  spec.input_batchnorm = read_value<int>(in, "input_batchnorm") != 0;
  spec.validate();

  Mlp mlp;
  mlp.spec = spec;
  expect_key(in, "seed");
  mlp.seed = read_value<std::uint64_t>(in, "seed");
  expect_key(in, "input_transform");
  const auto tdim = read_value<Eigen::Index>(in, "input_transform size");
  if (tdim != 0) {
    if (tdim != spec.input_dim) throw SchemaError("model file: input transform size mismatch");
    mlp.input.shift.resize(tdim);
    mlp.input.scale.resize(tdim);
    for (Eigen::Index i = 0; i < tdim; ++i) mlp.input.shift(i) = read_real(in);
    for (Eigen::Index i = 0; i < tdim; ++i) mlp.input.scale(i) = read_real(in);
  }
  int fan_in = spec.input_dim;
  std::vector<int> outs = spec.hidden_widths;
  outs.push_back(spec.output_dim);
  for (std::size_t k = 0; k < outs.size(); ++k) {
    expect_key(in, "layer");
    const auto index = read_value<std::size_t>(in, "layer index");
    const auto rows = read_value<int>(in, "layer rows");
    const auto cols = read_value<int>(in, "layer cols");
    if (index != k || rows != outs[k] || cols != fan_in) {
      throw SchemaError("model file: layer " + std::to_string(k) + " shape does not match spec");
    }
    Layer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) layer.weight(r, c) = read_real(in);
    }
    for (int r = 0; r < rows; ++r) layer.bias(r) = read_real(in);
    mlp.params.layers.push_back(std::move(layer));
    fan_in = rows;
  }
  return mlp;
}

Mlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_mlp(in);
}

}  // namespace amplab::nn
