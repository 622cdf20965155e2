/*
 * Copyright (C) 2026 The hardylab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
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

namespace hardylab {

// Argument outside the domain of a weight or map (t <= 0, t > 1, s outside (0,1]).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iteration depth outside [0, kMaxDepth].
class DepthError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Result not representable as a normal double.
class UnderflowError : public std::range_error {
public:
    using std::range_error::range_error;
};

// Inputs fall outside the regime a routine is defined for (for example p > n).
class RegimeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented precondition on a profile or parameter is violated.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quadrature sample was not finite. Carries the offending node.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double node)
        : std::runtime_error(what), node_(node) {}
    double node() const noexcept { return node_; }

private:
    double node_;
};

} // namespace hardylab
