// error.hpp: error kinds raised by the rdcont library.
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rdcont {

enum class ErrorKind {
  EmptyData,
  NonFiniteValue,
  QOutOfRange,
  InvalidAlpha,
  DegenerateSample,
  InvalidReference,
  InvalidParam,
  MissingPiF,
  FileNotFound,
  ColumnNotFound,
  ParseError,
  EmptyAfterFiltering,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library exception. `location()` carries a zero-based element index
/// (NonFiniteValue) or a one-based file line (ParseError) when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> location = std::nullopt)
      : std::runtime_error(message), kind_(kind), location_(location) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> location_;
};

}  // namespace rdcont
