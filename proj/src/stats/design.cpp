#include "amplab/stats/design.hpp"

#include <algorithm>
#include <cmath>

#include "amplab/core/error.hpp"

namespace amplab::stats {

DesignMatrix& DesignMatrix::add_column(std::string name, std::vector<double> values) {
  if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
    throw SchemaError("design matrix: duplicate column '" + name + "'");
  }
  if (!columns_.empty() && values.size() != rows()) {
    throw ShapeError("design matrix: column '" + name + "' has " + std::to_string(values.size()) +
                     " rows, expected " + std::to_string(rows()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidParameterError("design matrix: column '" + name + "' has a non-finite entry");
    }
  }
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
  return *this;
}

const std::vector<double>& DesignMatrix::column(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw SchemaError("design matrix: no column '" + name + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

Eigen::MatrixXd DesignMatrix::matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  for (std::size_t j = 0; j < cols(); ++j) {
    m.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(columns_[j].data(), static_cast<Eigen::Index>(rows()));
  }
  return m;
}

}  // namespace amplab::stats
