#pragma once

#include <filesystem>
#include <iosfwd>

#include "amplab/nn/mlp.hpp"

namespace amplab::nn {

// Plain-text model file, version 1:
//
//   amplab-mlp 1
//   input_dim <d>
//   hidden <w1> <w2> ...
//   output_dim <k>
//   activation <relu|tanh|softplus>
//   input_batchnorm <0|1>
//   seed <u64>
//   input_transform <d or 0>
//   <shift values> / <scale values>        (only when d > 0)
//   layer <index> <rows> <cols>
//   <rows lines of weights, row-major> / <bias line>
//
// Reals use 17 significant digits so save/load is exact.
void save_mlp(const Mlp& mlp, std::ostream& out);
void save_mlp(const Mlp& mlp, const std::filesystem::path& path);
Mlp load_mlp(std::istream& in);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace amplab::nn
