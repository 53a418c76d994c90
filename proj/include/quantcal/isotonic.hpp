#pragma once

#include <cstddef>
#include <vector>

namespace quantcal {

// Euclidean projection onto the cone of non-decreasing vectors, and onto
// translated / separated variants of that cone. All projections run in
// O(n) via pool-adjacent-violators.

// True when v[i] <= v[i+1] for every adjacent pair (empty and singleton
// vectors count as sorted).
bool is_nondecreasing(const std::vector<double>& v);

// Projection of x onto { z : z[0] <= z[1] <= ... }. The output is
// non-decreasing under exact double comparison, idempotent, and returns
// already-sorted inputs unchanged bit for bit.
std::vector<double> pava(const std::vector<double>& x);

// Projection of x onto { z : z + b is non-decreasing }, computed as
// pava(x + b) - b. Requires b.size() == x.size().
std::vector<double> project_shifted(const std::vector<double>& x,
                                    const std::vector<double>& b);

// Projection of x onto { z : (z + b)[i+1] - (z + b)[i] >= eps }, the set of
// offsets whose shifted values are separated by at least eps. Implemented by
// subtracting the ramp i*eps, pooling, and adding the ramp back.
// Requires eps >= 0; eps == 0 reduces to project_shifted.
std::vector<double> project_eps_separated(const std::vector<double>& x,
                                          const std::vector<double>& b,
                                          double eps);

// Same separation projection applied directly to values rather than offsets:
// returns the closest vector q with q[i+1] - q[i] >= eps.
std::vector<double> pava_eps_separated(const std::vector<double>& x, double eps);

} // namespace quantcal
