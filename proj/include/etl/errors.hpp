#pragma once

#include <stdexcept>
#include <string>

namespace etl {

// Stable error codes; the CLI prints them on the machine-readable error line.
enum class ErrorCode {
  ParseError,
  ValidationError,
  TableNotFound,
  StoreCorruption,
  PersistenceError,
  SnapshotNotFound,
  InvariantViolation,
  UnknownFeed,
  UnknownColumn,
  FutureDate,
  MissingFkValue,
  HistoryRowNotFound,
  DuplicateStatic,
  FeedMissing,
  Lv1Missing,
  BatchSequence,
  PhaseFailure,
  TargetSetMismatch,
  UsageError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(std::move(message)) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace etl
