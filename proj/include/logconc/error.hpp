#pragma once

#include <stdexcept>
#include <string>

namespace logconc {

enum class ErrorKind {
  invalid_argument,
  resource,   // memory budget, truncation too short
  precision,  // working precision or truncation cannot decide a bound
  format,     // malformed input file
  domain,     // e.g. no bracket for the saddle point
  identity,   // an exact identity failed: arithmetic bug, never a finding
  io,
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace logconc
