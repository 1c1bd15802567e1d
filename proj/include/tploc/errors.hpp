#pragma once

#include <stdexcept>
#include <string>

namespace tploc {

/// Broad failure class; the CLI maps each category to a distinct exit code.
enum class ErrorCategory { kContract, kNumeric, kConfig, kData };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// A caller broke a documented precondition (shape mismatch, non-scalar loss, ...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorCategory::kContract, what) {}
};

/// An input that must be non-empty was empty.
class EmptyInputError : public ContractViolation {
 public:
  explicit EmptyInputError(const std::string& what) : ContractViolation(what) {}
};

/// NaN/Inf produced by a computation.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::kData, what) {}
};

class CorruptCorpusError : public DataError {
 public:
  explicit CorruptCorpusError(const std::string& what) : DataError(what) {}
};

class VersionError : public DataError {
 public:
  explicit VersionError(const std::string& what) : DataError(what) {}
};

class VocabError : public DataError {
 public:
  explicit VocabError(const std::string& what) : DataError(what) {}
};

class TooFewInstancesError : public DataError {
 public:
  explicit TooFewInstancesError(const std::string& what) : DataError(what) {}
};

inline int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return 2;
    case ErrorCategory::kData: return 3;
    case ErrorCategory::kNumeric: return 4;
    case ErrorCategory::kContract: return 5;
  }
  return 1;
}

}  // namespace tploc
