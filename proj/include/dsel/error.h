// dsel/error.h

// Copyright 2026  The dsel Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DSEL_ERROR_H_
#define DSEL_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsel {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Raised while parsing a manifest; line is 1-based, 0 when not line-bound.
class ManifestError : public Error {
 public:
  ManifestError(std::size_t line, std::string field, const std::string &msg)
      : Error(Format(line, field, msg)), line_(line), field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string &field() const { return field_; }

 private:
  static std::string Format(std::size_t line, const std::string &field,
                            const std::string &msg) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "field '" + field + "': ";
    return out + msg;
  }

  std::size_t line_;
  std::string field_;
};

class DuplicateIdError : public Error {
 public:
  DuplicateIdError(const std::string &id, std::size_t first_line,
                   std::size_t second_line)
      : Error("duplicate segment id '" + id + "'" +
              (first_line > 0 ? " on lines " + std::to_string(first_line) +
                                    " and " + std::to_string(second_line)
                              : std::string())),
        id_(id) {}
  const std::string &id() const { return id_; }

 private:
  std::string id_;
};

class InsufficientHypothesesError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t actual)
      : Error("feature dimension mismatch: model expects " +
              std::to_string(expected) + ", got " + std::to_string(actual)),
        expected_(expected), actual_(actual) {}
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_, actual_;
};

class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsel

#endif  // DSEL_ERROR_H_
