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

#ifndef SYSDPA_ERRORS_HPP
#define SYSDPA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sysdpa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IndexError : public Error {
  public:
    using Error::Error;
};

/// Dimensions of two operands disagree.
class ShapeError : public Error {
  public:
    using Error::Error;
};

class GeometryError : public Error {
  public:
    using Error::Error;
};

class PreconditionError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

/// Every hypothesis row (or the trace column) had zero variance, so no
/// correlation is defined and the attack cannot rank anything.
class DegenerateAttackError : public Error {
  public:
    using Error::Error;
};

/// Two trace sets do not share the same input batches.
class AlignmentError : public Error {
  public:
    using Error::Error;
};

/// SCTR / manifest / CSV parse failures. `offset()` is the byte offset of
/// the offending field, or -1 when not applicable.
class FormatError : public Error {
  public:
    FormatError(const std::string &what, long long offset = -1)
        : Error(offset >= 0 ? what + " (at byte offset " +
                                  std::to_string(offset) + ")"
                            : what),
          offset_(offset) {}
    long long offset() const noexcept { return offset_; }

  private:
    long long offset_;
};

} // namespace sysdpa

#endif // SYSDPA_ERRORS_HPP
