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

#include "uavsec/lp.hpp"

#include "uavsec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace uavsec
{

std::string to_string(LpStatus status)
{
    switch (status)
    {
    case LpStatus::Optimal:
        return "optimal";
    case LpStatus::Unbounded:
        return "unbounded";
    case LpStatus::IterationLimit:
        return "iteration-limit";
    }
    return "unknown";
}

LpResult maximize_lp(const arma::vec &c, const arma::mat &a, const arma::vec &b, int max_pivots)
{
    const arma::uword m = a.n_rows;
    const arma::uword n = a.n_cols;
    if (c.n_elem != n || b.n_elem != m)
        throw InvalidInputError("maximize_lp: dimension mismatch");
    if (arma::any(b < 0.0))
        throw InvalidInputError("maximize_lp: right-hand side must be nonnegative");
    if (!a.is_finite() || !b.is_finite() || !c.is_finite())
        throw InvalidInputError("maximize_lp: non-finite data");

    // Tableau rows 0..m-1 are constraints, row m is the objective (reduced costs).
    // Columns 0..n-1 structural, n..n+m-1 slacks, n+m the right-hand side.
    const arma::uword cols = n + m + 1;
    arma::mat t(m + 1, cols, arma::fill::zeros);
    if (m > 0 && n > 0)
        t.submat(0, 0, m - 1, n - 1) = a;
    for (arma::uword i = 0; i < m; ++i)
    {
        t(i, n + i) = 1.0;
        t(i, cols - 1) = b(i);
    }
    for (arma::uword j = 0; j < n; ++j)
        t(m, j) = -c(j);

    std::vector<arma::uword> basis(m);
    for (arma::uword i = 0; i < m; ++i)
        basis[i] = n + i;

    const double cost_eps = 1e-12 * (1.0 + (n > 0 ? arma::abs(c).max() : 0.0));
    const double pivot_eps = 1e-12 * (1.0 + (m > 0 && n > 0 ? arma::abs(a).max() : 0.0));

    LpResult res;
    res.status = LpStatus::IterationLimit;
    for (int pivot = 0; pivot <= max_pivots; ++pivot)
    {
        // Bland: lowest-index improving column
        arma::uword enter = cols;
        for (arma::uword j = 0; j + 1 < cols; ++j)
            if (t(m, j) < -cost_eps)
            {
                enter = j;
                break;
            }
        if (enter == cols)
        {
            res.status = LpStatus::Optimal;
            res.pivots = pivot;
            break;
        }
        if (pivot == max_pivots)
        {
            res.pivots = pivot;
            break;
        }

        arma::uword leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (arma::uword i = 0; i < m; ++i)
        {
            if (t(i, enter) <= pivot_eps)
                continue;
            const double ratio = t(i, cols - 1) / t(i, enter);
            const double tie = 1e-15 * (1.0 + std::abs(ratio));
            if (leave == m || ratio < best_ratio - tie ||
                (std::abs(ratio - best_ratio) <= tie && basis[i] < basis[leave]))
            {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == m)
        {
            res.status = LpStatus::Unbounded;
            res.pivots = pivot;
            break;
        }

        t.row(leave) /= t(leave, enter);
        for (arma::uword i = 0; i <= m; ++i)
            if (i != leave && t(i, enter) != 0.0)
                t.row(i) -= t(i, enter) * t.row(leave);
        basis[leave] = enter;
    }

    res.x.zeros(n);
    for (arma::uword i = 0; i < m; ++i)
        if (basis[i] < n)
            res.x(basis[i]) = std::max(0.0, t(i, cols - 1));
    res.objective = arma::dot(c, res.x);
    return res;
}

} // namespace uavsec
