#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wfwl {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Position or id outside the valid domain.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// select() asked for an occurrence that does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A code is not a leaf / not a path of the relevant code tree.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// Malformed N-Triples input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

/// Corrupted or incompatible serialized database.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Ill-formed or ill-typed query.
class QueryError : public Error {
 public:
  QueryError(const std::string& what, std::size_t position = 0)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Well-formed query using a construct outside the supported subset.
class UnsupportedError : public QueryError {
 public:
  using QueryError::QueryError;
};

}  // namespace wfwl
