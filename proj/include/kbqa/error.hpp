// Copyright 2026 The kbqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kbqa {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; `line` is 1-based, 0 when not line-oriented.
class FormatError : public Error {
 public:
  FormatError(std::string file, std::size_t line, const std::string& message)
      : Error(describe(file, line, message)), file_(std::move(file)), line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  static std::string describe(const std::string& file, std::size_t line,
                              const std::string& message) {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + message;
  }

  std::string file_;
  std::size_t line_;
};

// A dangling identifier in KB content.
class ReferentialError : public Error {
 public:
  ReferentialError(std::string id, const std::string& message)
      : Error(message), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// An operation named an id the KB has never held.
class UnknownIdError : public Error {
 public:
  explicit UnknownIdError(std::string id)
      : Error("unknown id: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Query text failed to parse. what() is the human-readable message only;
// position is a byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : Error(message), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A logical form was required but the NK sentinel was supplied.
class NKInputError : public Error {
 public:
  NKInputError() : Error("operation requires a logical form, got NK") {}
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class UnknownTemplateError : public TemplateError {
 public:
  explicit UnknownTemplateError(const std::string& id) : TemplateError("unknown template: " + id) {}
};

class UnboundPlaceholderError : public TemplateError {
 public:
  UnboundPlaceholderError(const std::string& template_id, std::string name)
      : TemplateError("template " + template_id + ": placeholder {" + name + "} is not bound"),
        name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class GatewayError : public Error {
 public:
  enum class Kind { Timeout, Auth, RateLimit, Transport, Protocol, MockMiss };

  GatewayError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class InsufficientExamplesError : public Error {
 public:
  using Error::Error;
};

}  // namespace kbqa
