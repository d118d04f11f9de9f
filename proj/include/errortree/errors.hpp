#pragma once

#include <stdexcept>
#include <string>

namespace errortree {

/// Error classes map one-to-one onto CLI exit codes.
enum class ErrorClass : int {
  internal = 1,
  input = 2,
  capability = 3,
  divergence = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }

 private:
  ErrorClass cls_;
};

/// Bad symbols, empty inputs, malformed files.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// Invalid numeric parameters (k < 0, m == 0, too many wildcards, ...).
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// Query asks for more than the index was built for.
class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what) : Error(ErrorClass::capability, what) {}
};

/// Pattern incompatible with a text-mode index (length != m) and similar.
class ModeError : public Error {
 public:
  explicit ModeError(const std::string& what) : Error(ErrorClass::capability, what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// Index image problems. Each subclass is a distinct failure mode on load.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorClass::input, what) {}
};

class VersionError : public Error {
 public:
  explicit VersionError(const std::string& what) : Error(ErrorClass::input, what) {}
};

class ChecksumError : public Error {
 public:
  explicit ChecksumError(const std::string& what) : Error(ErrorClass::input, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorClass::input, what) {}
};

}  // namespace errortree
