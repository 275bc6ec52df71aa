#pragma once

#include <stdexcept>
#include <string>

namespace fairadapt {

// Base class for all errors raised by the library. Subclasses map 1:1 onto
// the C API status codes, so every throw site picks the most specific type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatch between tensors, layers, or corpora.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Malformed file, CSV row, or JSON document.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Non-finite values or failed numeric preconditions.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

// API contract violation (empty batch, non-scalar backward root, ...).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& msg) : Error(msg) {}
};

// A fairness metric is undefined on the given predictions (empty group cell).
class MetricUndefinedError : public Error {
 public:
  explicit MetricUndefinedError(const std::string& msg) : Error(msg) {}
};

// Filesystem failure; message carries the offending path.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace fairadapt
