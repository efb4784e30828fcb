#ifndef PANELCAST_ERRORS_HPP_
#define PANELCAST_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace panelcast {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with the contents of the input data (parsing, schema, history).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A caller handed in an argument outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration field failed validation. `field()` names the offender.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string field, const std::string& message)
      : InvalidArgument(field.empty() ? message : field + ": " + message),
        field_(std::move(field)),
        detail_(message) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string field_;
  std::string detail_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class MalformedRow : public DataError {
 public:
  MalformedRow(std::size_t line, const std::string& message)
      : DataError("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownPoliticalStatus : public DataError {
 public:
  UnknownPoliticalStatus(std::size_t line, const std::string& value)
      : DataError("line " + std::to_string(line) + ": unknown political_status '" + value +
                  "' (expected R, D or S)"),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateStateYear : public DataError {
 public:
  DuplicateStateYear(const std::string& state, int year)
      : DataError("duplicate record for " + state + " " + std::to_string(year)) {}
};

class InsufficientHistory : public DataError {
 public:
  using DataError::DataError;
};

class WindowTooLarge : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class EmptyTrainingSet : public DataError {
 public:
  using DataError::DataError;
};

class EmptySplit : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ZeroActual : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InconsistentStateSets : public DataError {
 public:
  using DataError::DataError;
};

class ShapeMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidRate : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Training produced a NaN/inf loss or parameter.
class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(int epoch)
      : Error("non-finite loss or parameter at epoch " + std::to_string(epoch)), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// A pipeline failure inside one trial of a multi-trial run.
class TrialFailed : public Error {
 public:
  TrialFailed(int trial_id, const std::string& message)
      : Error("trial " + std::to_string(trial_id) + ": " + message), trial_id_(trial_id) {}
  int trial_id() const noexcept { return trial_id_; }

 private:
  int trial_id_;
};

}  // namespace panelcast

#endif  // PANELCAST_ERRORS_HPP_
