#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qpack {

enum class ErrorKind {
  InvalidParameter,
  Placement,
  UnderResolution,
  Instability,
  Config,
  Analysis,
  ModeLost,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InstabilityError : public Error {
 public:
  explicit InstabilityError(std::int64_t step)
      : Error(ErrorKind::Instability,
              "numerical instability: non-finite field value at step " + std::to_string(step)),
        step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qpack
