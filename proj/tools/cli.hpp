/*
 * SPDX-FileCopyrightText: Copyright 2026 The sysdpa Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SYSDPA_TOOLS_CLI_HPP
#define SYSDPA_TOOLS_CLI_HPP

#include <iostream>

namespace sysdpa::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDegenerate = 2,
};

/// Parses argv, runs one subcommand and returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out = std::cout,
        std::ostream &err = std::cerr);

} // namespace sysdpa::cli

#endif // SYSDPA_TOOLS_CLI_HPP
