#include "amplab/data/idx.hpp"

#include <fstream>
#include <iterator>

#include "amplab/core/error.hpp"

namespace amplab::data {

IdxArray read_idx_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (bytes.size() < 4) throw FormatError(where + "truncated magic number", bytes.size());
  if (bytes[0] != 0 || bytes[1] != 0) throw FormatError(where + "bad magic number", 0);
  if (bytes[2] != 0x08) {
    throw FormatError(where + "unsupported element type (only unsigned byte data is accepted)", 2);
  }
  const std::size_t ndim = bytes[3];
  if (ndim == 0) throw FormatError(where + "zero dimensions in header", 3);
  IdxArray out;
  std::size_t pos = 4;
  std::size_t count = 1;
  for (std::size_t d = 0; d < ndim; ++d) {
    if (pos + 4 > bytes.size()) throw FormatError(where + "truncated dimension header", pos);
    const std::uint32_t v = (std::uint32_t{bytes[pos]} << 24) | (std::uint32_t{bytes[pos + 1]} << 16) |
                            (std::uint32_t{bytes[pos + 2]} << 8) | std::uint32_t{bytes[pos + 3]};
    out.dims.push_back(v);
    count *= v;
    pos += 4;
  }
  if (bytes.size() - pos < count) {
    throw FormatError(where + "payload holds " + std::to_string(bytes.size() - pos) +
                          " bytes, header promises " + std::to_string(count),
                      bytes.size());
  }
  if (bytes.size() - pos > count) {
    throw FormatError(where + "trailing bytes after payload", pos + count);
  }
  out.values.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return out;
}

void write_idx_file(const IdxArray& array, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const unsigned char header[4] = {0, 0, 0x08, static_cast<unsigned char>(array.dims.size())};
  out.write(reinterpret_cast<const char*>(header), 4);
  for (std::uint32_t d : array.dims) {
    const unsigned char be[4] = {static_cast<unsigned char>(d >> 24), static_cast<unsigned char>(d >> 16),
                                 static_cast<unsigned char>(d >> 8), static_cast<unsigned char>(d)};
    out.write(reinterpret_cast<const char*>(be), 4);
  }
  out.write(reinterpret_cast<const char*>(array.values.data()),
            static_cast<std::streamsize>(array.values.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

GroupedDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const IdxArray img = read_idx_file(images);
  const IdxArray lab = read_idx_file(labels);
  if (lab.dims.size() != 1) throw FormatError(labels.string() + ": label file must be 1-D", 3);
  const std::size_t n = img.dims[0];
  if (lab.dims[0] != n) {
    throw FormatError(labels.string() + ": " + std::to_string(lab.dims[0]) +
                          " labels for " + std::to_string(n) + " images",
                      4);
  }
  const std::size_t d = n == 0 ? 0 : img.values.size() / n;
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = img.values[i * d + j] / 255.0;
    }
  }
  std::vector<int> y(lab.values.begin(), lab.values.end());
  return GroupedDataset(std::move(x), std::move(y), std::vector<int>(n, 0));
}

}  // namespace amplab::data
