#pragma once

#include <stdexcept>
#include <string>

namespace stepgraph {

enum class ErrorCode {
  // lexing
  UnterminatedString,
  UnterminatedComment,
  IllegalCharacter,
  // parsing
  MissingIsoHeader,
  DuplicateInstanceId,
  MalformedInstance,
  MissingDataSection,
  // graph io
  MalformedGraphml,
  EmptyCorpus,
  // gnn
  EmptyGraph,
  DimensionMismatch,
  NonFiniteLoss,
  EmptyTrainSet,
  // retrieval
  UnknownLayerTag,
  LengthMismatch,
  NegativeEntries,
  ZeroVector,
  InconsistentLayerTags,
  NoQueries,
  // pipeline
  ClassTooSmall,
  InvalidArgument,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Position inside a source file, 1-based.
struct SourcePos {
  int line = 1;
  int column = 1;
  bool operator==(const SourcePos&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  Error(ErrorCode code, std::string message, SourcePos pos)
      : std::runtime_error(std::string(error_code_name(code)) + " at " +
                           std::to_string(pos.line) + ":" +
                           std::to_string(pos.column) + ": " + message),
        code_(code),
        pos_(pos),
        has_pos_(true) {}

  ErrorCode code() const { return code_; }
  bool has_pos() const { return has_pos_; }
  SourcePos pos() const { return pos_; }

  /// Same error with leading context (e.g. a file path) prepended to the
  /// already-formatted text.
  static Error with_context(const std::string& context, const Error& inner) {
    Error out(inner.code_, Preformatted{}, context + ": " + inner.what());
    out.pos_ = inner.pos_;
    out.has_pos_ = inner.has_pos_;
    out.instance_id = inner.instance_id;
    return out;
  }

  /// Offending instance id for instance-scoped parse errors, 0 otherwise.
  long long instance_id = 0;

 private:
  struct Preformatted {};
  Error(ErrorCode code, Preformatted, std::string full_text)
      : std::runtime_error(std::move(full_text)), code_(code) {}

  ErrorCode code_;
  SourcePos pos_{};
  bool has_pos_ = false;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::UnterminatedComment: return "UnterminatedComment";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::MissingIsoHeader: return "MissingIsoHeader";
    case ErrorCode::DuplicateInstanceId: return "DuplicateInstanceId";
    case ErrorCode::MalformedInstance: return "MalformedInstance";
    case ErrorCode::MissingDataSection: return "MissingDataSection";
    case ErrorCode::MalformedGraphml: return "MalformedGraphml";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::EmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::UnknownLayerTag: return "UnknownLayerTag";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NegativeEntries: return "NegativeEntries";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InconsistentLayerTags: return "InconsistentLayerTags";
    case ErrorCode::NoQueries: return "NoQueries";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace stepgraph
