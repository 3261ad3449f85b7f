#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace amplab::stats {

// Named regressor columns of equal length.
class DesignMatrix {
 public:
  DesignMatrix() = default;

  // Throws SchemaError on a duplicate name, ShapeError on a length
  // mismatch, InvalidParameterError on non-finite entries.
  DesignMatrix& add_column(std::string name, std::vector<double> values);

  std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }
  const std::vector<double>& column(const std::string& name) const;

  Eigen::MatrixXd matrix() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

}  // namespace amplab::stats
