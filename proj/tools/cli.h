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

#ifndef EGOBENCH_TOOLS_CLI_H_
#define EGOBENCH_TOOLS_CLI_H_

#include <iosfwd>

namespace egobench::cli {

// Exit codes: 0 success, 1 violations or failed checks, 2 usage, I/O or
// format errors.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace egobench::cli

#endif  // EGOBENCH_TOOLS_CLI_H_
