// Copyright 2026 The DIMNet-Toy Authors. All Rights Reserved.
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

#ifndef DIMNET_ERROR_H_
#define DIMNET_ERROR_H_

#include <stdexcept>
#include <string>

namespace dimnet {

enum class ErrorCode {
  kConfig = 1,
  kShape,
  kParse,
  kLexiconMiss,
  kIndexOutOfRange,
  kNumerics,
  kAllBlank,
  kIo,
  kInvalidArgument,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorCode::kParse,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class LexiconMiss : public Error {
 public:
  explicit LexiconMiss(const std::string& token)
      : Error(ErrorCode::kLexiconMiss, "token not in lexicon: " + token),
        token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& what);

#define DIMNET_CHECK_SHAPE(cond, msg)                                 \
  do {                                                                \
    if (!(cond)) ::dimnet::Fail(::dimnet::ErrorCode::kShape, (msg));  \
  } while (0)

}  // namespace dimnet

#endif  // DIMNET_ERROR_H_
