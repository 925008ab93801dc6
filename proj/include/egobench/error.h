// Copyright 2026 The egobench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EGOBENCH_ERROR_H_
#define EGOBENCH_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace egobench {

enum class ErrorCode {
  kParseError,      // malformed JSON or a field of the wrong shape
  kIntegrityError,  // dangling or duplicated ids, inconsistent instance labels
  kInvalidArgument,
  kShapeMismatch,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All failures raised by the library. The code is stable and machine
// readable; the message names the offending record or field.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace egobench

#endif  // EGOBENCH_ERROR_H_
