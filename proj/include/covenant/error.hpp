// Copyright 2026 The Covenant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace covenant {

// Pipeline stage that raised an error. Used for CLI diagnostics and exit codes.
enum class Stage {
  kParse,
  kValidate,
  kInstantiate,
  kSchedule,
  kOptimize,
  kCodegen,
  kSimulate,
  kOracle,
  kIo,
};

const char* StageName(Stage stage);

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& message)
      : std::runtime_error(message), stage_(stage) {}

  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error(Stage::kParse, std::to_string(line) + ":" +
                                 std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace covenant
