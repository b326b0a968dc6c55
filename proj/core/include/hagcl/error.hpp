#pragma once

#include <stdexcept>
#include <string>

namespace hagcl {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A violated API contract: bad arguments, missing gradients, misuse.
class ContractError : public Error {
  using Error::Error;
};

// Operand shapes do not line up.
class ShapeError : public ContractError {
  using ContractError::ContractError;
};

// An index (segment id, gather index) is out of range.
class IndexError : public ContractError {
  using ContractError::ContractError;
};

// Math domain violation: log of a non-positive value, division by zero.
class DomainError : public Error {
  using Error::Error;
};

// Non-finite values encountered during optimization.
class NumericError : public Error {
  using Error::Error;
};

// Dataset ingestion or file-format failure.
class DataError : public Error {
  using Error::Error;
};

// Invalid run configuration.
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace hagcl
