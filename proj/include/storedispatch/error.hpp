/*
 * Copyright 2026 The storedispatch Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace storedispatch {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    Parse,
    Io,
    InfeasibleTarget,
    UndefinedMetric,
};

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when an allocation is asked to deliver more than the available power.
class InfeasibleTargetError : public Error {
public:
    InfeasibleTargetError(double shortfall_mw, const std::string& message)
        : Error(ErrorCode::InfeasibleTarget, message), shortfall_mw_(shortfall_mw) {}

    double shortfall_mw() const noexcept { return shortfall_mw_; }

private:
    double shortfall_mw_;
};

}  // namespace storedispatch
