/*
   Copyright 2026 the levydiv authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace levydiv {

/// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid model parameters (rejected at validation time).
struct model_error : error {
    explicit model_error(const std::string& msg) : error(msg) {}
};

/// Argument outside an operation's domain.
struct domain_error : error {
    explicit domain_error(const std::string& msg) : error(msg) {}
};

/// Numerical failure: root bracketing, inversion non-convergence,
/// quadrature breakdown. The message carries the controlling parameter.
struct numeric_error : error {
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

/// Operation not defined for this model class (e.g. creeping with sigma=0).
struct unsupported_error : error {
    explicit unsupported_error(const std::string& msg) : error(msg) {}
};

/// Inadmissible dividend lump requested by a strategy plug-in.
struct strategy_error : error {
    explicit strategy_error(const std::string& msg) : error(msg) {}
};

} // namespace levydiv
