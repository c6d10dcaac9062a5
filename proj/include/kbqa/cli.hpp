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

// The kbqa command-line front end. Exit codes: 0 success, 1 per-item
// failures present, 2 usage or fatal configuration error.

#include <ostream>
#include <string>
#include <vector>

namespace kbqa {

inline constexpr int kExitOk = 0;
inline constexpr int kExitItemFailures = 1;
inline constexpr int kExitFatal = 2;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kbqa
