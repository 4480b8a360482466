#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynthreads {

enum class ErrorKind {
  UnboundName,
  DimensionMismatch,
  UnboundParameter,
  UnboundVariable,
  ArityMismatch,
  ShadowedBinder,
  IllFormed,
  Parse,
  Type,
  UnknownTid,
  NotFirstOrderResult,
  UnboundTid,
  AlphabetCollision,
  FuelExhausted,
  Deadlock,
  StuckThread,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI)
// can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dynthreads
