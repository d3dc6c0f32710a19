/******************************************************************************
 * Copyright 2026 The ghxctl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#ifndef GHXCTL_ERROR_HPP
#define GHXCTL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ghxctl {

// Bad user input: malformed config files, CSV rows, CLI flags. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: singular pivots, non-convergence, divergence guards,
// violated preconditions on matrix arguments. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ghxctl

#endif  // GHXCTL_ERROR_HPP
