#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace amplab {

// Coarse category used by the CLI to pick an exit code.
enum class ErrorKind { usage, data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string tag, const std::string& what)
      : std::runtime_error(what), kind_(kind), tag_(std::move(tag)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Short machine-readable identifier, e.g. "shape" or "singular-design".
  const std::string& tag() const noexcept { return tag_; }

 private:
  ErrorKind kind_;
  std::string tag_;
};

#define AMPLAB_DEFINE_ERROR(Name, Kind, Tag)                          \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(Kind, Tag, what) {} \
  };

AMPLAB_DEFINE_ERROR(InvalidSpecError, ErrorKind::data, "invalid-spec")
AMPLAB_DEFINE_ERROR(InvalidParameterError, ErrorKind::data, "invalid-parameter")
AMPLAB_DEFINE_ERROR(ShapeError, ErrorKind::data, "shape")
AMPLAB_DEFINE_ERROR(LabelError, ErrorKind::data, "label")
AMPLAB_DEFINE_ERROR(EmptyDataError, ErrorKind::data, "empty-data")
AMPLAB_DEFINE_ERROR(GroupError, ErrorKind::data, "group")
AMPLAB_DEFINE_ERROR(ClassError, ErrorKind::data, "class")
AMPLAB_DEFINE_ERROR(StratificationError, ErrorKind::data, "stratification")
AMPLAB_DEFINE_ERROR(BalanceError, ErrorKind::data, "matched-distribution")
AMPLAB_DEFINE_ERROR(SchemaError, ErrorKind::data, "schema")
AMPLAB_DEFINE_ERROR(IoError, ErrorKind::data, "io")
AMPLAB_DEFINE_ERROR(ConfigError, ErrorKind::data, "config")
AMPLAB_DEFINE_ERROR(IncompleteProtocolError, ErrorKind::data, "incomplete-protocol")
AMPLAB_DEFINE_ERROR(UnsupportedActivationError, ErrorKind::usage, "unsupported-activation")
AMPLAB_DEFINE_ERROR(DegenerateError, ErrorKind::numeric, "degenerate")
AMPLAB_DEFINE_ERROR(DegreesOfFreedomError, ErrorKind::numeric, "degrees-of-freedom")

#undef AMPLAB_DEFINE_ERROR

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::data, "format", what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class InsufficientReserveError : public Error {
 public:
  InsufficientReserveError(const std::string& what, std::size_t deficit)
      : Error(ErrorKind::data, "insufficient-reserve", what), deficit_(deficit) {}
  std::size_t deficit() const noexcept { return deficit_; }

 private:
  std::size_t deficit_;
};

class SingularDesignError : public Error {
 public:
  SingularDesignError(const std::string& what, std::vector<std::string> dependent)
      : Error(ErrorKind::numeric, "singular-design", what), dependent_(std::move(dependent)) {}
  const std::vector<std::string>& dependent_columns() const noexcept { return dependent_; }

 private:
  std::vector<std::string> dependent_;
};

}  // namespace amplab
