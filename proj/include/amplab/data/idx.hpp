#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "amplab/data/dataset.hpp"

namespace amplab::data {

// Raw unsigned-byte IDX array.
struct IdxArray {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> values;
};

// Throws FormatError (with byte offset) on a bad magic number, a non-ubyte
// element type, or a truncated payload.
IdxArray read_idx_file(const std::filesystem::path& path);
void write_idx_file(const IdxArray& array, const std::filesystem::path& path);

// Image file (n x d1 x d2 ...) plus label file (n); features are bytes / 255,
// every row lands in group 0.
GroupedDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

}  // namespace amplab::data
