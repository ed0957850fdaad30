// Copyright 2026 The meshgnn Authors. All Rights Reserved.
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
// =============================================================================

#ifndef MESHGNN_CLI_HPP
#define MESHGNN_CLI_HPP

#include <string>
#include <vector>

namespace meshgnn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

/// Entry point of the `meshgnn` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace meshgnn

#endif  // MESHGNN_CLI_HPP
