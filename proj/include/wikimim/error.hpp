#pragma once

#include <stdexcept>
#include <string>

namespace wikimim {

// Base class for every failure the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A serialized artifact (chain file, MIM object, journal line) could not be
// decoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A MIM object was applied to text other than the revision it was built from.
class StaleMimError : public Error {
 public:
  StaleMimError() : Error("stale MIM object") {}
  explicit StaleMimError(const std::string& detail)
      : Error("stale MIM object: " + detail) {}
};

// Lookup of an article, revision, account or file that does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace wikimim
