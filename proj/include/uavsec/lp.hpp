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

#ifndef UAVSEC_LP_HPP
#define UAVSEC_LP_HPP

#include <armadillo>
#include <string>

namespace uavsec
{

enum class LpStatus
{
    Optimal,
    Unbounded,
    IterationLimit
};

std::string to_string(LpStatus status);

struct LpResult
{
    arma::vec x;
    double objective = 0.0;
    LpStatus status = LpStatus::Optimal;
    int pivots = 0;
};

// Dense tableau simplex for  max c'x  s.t.  A x <= b,  x >= 0  with b >= 0, so the origin is a
// feasible starting vertex and no phase one is needed. Bland's rule prevents cycling. Sized
// for the handful of variables and rows the duration block produces.
LpResult maximize_lp(const arma::vec &c, const arma::mat &a, const arma::vec &b, int max_pivots = 10000);

} // namespace uavsec

#endif
