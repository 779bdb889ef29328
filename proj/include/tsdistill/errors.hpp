#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

namespace tsdistill {

/// Root of every error raised by the library. The subclasses partition
/// failures by who has to act: the caller (validation), the network
/// (transport), or the data itself.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameters, config, ids, preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A remote endpoint was unreachable, refused auth, or kept failing.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int http_status = 0)
      : Error(what), http_status_(http_status) {}
  int http_status() const noexcept { return http_status_; }

 private:
  int http_status_;
};

/// Malformed or inconsistent data (files, model replies, non-finite values).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit ParseError(const std::string& what, std::size_t offset = npos)
      : DataError(offset == npos ? what : what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// The annotator kept replying with something that is not the three-key JSON.
class AnnotationFormatError : public DataError {
 public:
  AnnotationFormatError(const std::string& what, std::string last_reply)
      : DataError(what), last_reply_(std::move(last_reply)) {}
  const std::string& last_reply() const noexcept { return last_reply_; }

 private:
  std::string last_reply_;
};

class FileError : public DataError {
 public:
  using DataError::DataError;
};

/// CLI exit code: 1 validation, 2 transport, 3 data, 4 anything else.
inline int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ValidationError*>(&e)) return 1;
  if (dynamic_cast<const TransportError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  return 4;
}

}  // namespace tsdistill
