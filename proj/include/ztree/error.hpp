#pragma once

#include <stdexcept>
#include <string>

namespace ztree {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: unreadable file, bad cell, broken schema.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A test input with zero variance (or an otherwise unusable sample).
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

/// A combination of options the library deliberately does not handle.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Node data too small for the requested number of folds.
class TooSmall : public Error {
 public:
  using Error::Error;
};

/// A metric that is undefined for its input (e.g. AUROC with one class).
class Undefined : public Error {
 public:
  using Error::Error;
};

class RefusedLowerThreshold : public Error {
 public:
  using Error::Error;
};

/// Model document that cannot be read back (version, schema, invariants).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ztree
