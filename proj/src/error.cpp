#include "dynthreads/error.hpp"

namespace dynthreads {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnboundName: return "UnboundName";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnboundParameter: return "UnboundParameter";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::ShadowedBinder: return "ShadowedBinder";
    case ErrorKind::IllFormed: return "IllFormed";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Type: return "TypeError";
    case ErrorKind::UnknownTid: return "UnknownTid";
    case ErrorKind::NotFirstOrderResult: return "NotFirstOrderResult";
    case ErrorKind::UnboundTid: return "UnboundTid";
    case ErrorKind::AlphabetCollision: return "AlphabetCollision";
    case ErrorKind::FuelExhausted: return "FuelExhausted";
    case ErrorKind::Deadlock: return "Deadlock";
    case ErrorKind::StuckThread: return "StuckThread";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace dynthreads
