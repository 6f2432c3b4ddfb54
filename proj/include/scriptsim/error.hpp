#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scriptsim {

enum class ErrorCode {
  MissingFile,
  EmptyAfterStrip,
  NoChaptersFound,
  InvalidRule,
  DuplicateLabel,
  EmptyCorpus,
  InvalidStopword,
  EmptyVocabulary,
  DimensionMismatch,
  ZeroVector,
  NegativeEntry,
  UnknownBook,
  TooFewBooks,
  KTooLarge,
  EmptyInput,
  NonFiniteInput,
  TooFewChapters,
  EmptyTrain,
  LengthMismatch,
  InvalidArgument,
  InvalidConfig,
  InvalidFormat,
  MissingUpstreamArtifact,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scriptsim
