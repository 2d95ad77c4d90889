// error.cpp

#include "rdcont/error.hpp"

namespace rdcont {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::QOutOfRange: return "QOutOfRange";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::InvalidReference: return "InvalidReference";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::MissingPiF: return "MissingPiF";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ColumnNotFound: return "ColumnNotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyAfterFiltering: return "EmptyAfterFiltering";
  }
  return "Unknown";
}

}  // namespace rdcont
