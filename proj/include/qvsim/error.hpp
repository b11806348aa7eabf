#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qvsim {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Filesystem or syscall failure (open, read, write, truncate).
class IoError : public Error {
    using Error::Error;
};

/// Structural problem in a state file: bad magic, version or length mismatch.
class FormatError : public Error {
    using Error::Error;
};

/// Circuit text rejected; carries the 1-based source line.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Cache window cannot hold the required working set.
class CapacityError : public Error {
    using Error::Error;
};

/// Dense baseline refused a qubit count beyond its configured limit.
class OracleLimitError : public Error {
    using Error::Error;
};

/// Invalid arguments: unknown gate, wrong arity, non-unitary matrix,
/// out-of-range index, bad sizes.
class ValidationError : public Error {
    using Error::Error;
};

} // namespace qvsim
