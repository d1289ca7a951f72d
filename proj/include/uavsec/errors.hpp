// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef UAVSEC_ERRORS_HPP
#define UAVSEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace uavsec
{

// Precondition violated by the caller (bad geometry, negative power, ...).
class InvalidInputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A solver could not reach its target; the message carries the diagnostics.
class NumericalFailureError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed config or command line.
class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace uavsec

#endif
