#include "etl/errors.hpp"

namespace etl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::TableNotFound: return "TableNotFound";
    case ErrorCode::StoreCorruption: return "StoreCorruption";
    case ErrorCode::PersistenceError: return "PersistenceError";
    case ErrorCode::SnapshotNotFound: return "SnapshotNotFound";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::UnknownFeed: return "UnknownFeed";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::FutureDate: return "FutureDate";
    case ErrorCode::MissingFkValue: return "MissingFkValue";
    case ErrorCode::HistoryRowNotFound: return "HistoryRowNotFound";
    case ErrorCode::DuplicateStatic: return "DuplicateStatic";
    case ErrorCode::FeedMissing: return "FeedMissing";
    case ErrorCode::Lv1Missing: return "Lv1Missing";
    case ErrorCode::BatchSequence: return "BatchSequence";
    case ErrorCode::PhaseFailure: return "PhaseFailure";
    case ErrorCode::TargetSetMismatch: return "TargetSetMismatch";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "UnknownError";
}

}  // namespace etl
