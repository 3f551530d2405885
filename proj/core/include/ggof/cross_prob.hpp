#pragma once

#include <cstdint>
#include <vector>

namespace ggof {

// Lower boundaries for uniform order statistics. Entries outside the active
// range [k0, k1] (1-based) are zero; the event of interest is
// U_(i) > c[i-1] for every i.
struct BoundaryVector {
    int n = 0;
    std::vector<double> c;
    int k0 = 1;
    int k1 = 0;  // 0 means n

    static BoundaryVector full(std::vector<double> bounds);
    static BoundaryVector ranged(std::vector<double> bounds, int k0, int k1);
    int resolved_k1() const { return k1 <= 0 ? n : k1; }
};

struct CrossProb {
    double value = 0.0;
    bool underflow = false;  // true when the probability fell below 1e-300
};

// Exact P(U_(i) > c_i for all i) for n iid Uniform(0,1) order statistics,
// via a counting recursion over the monotonized distinct boundary levels.
// Work scales with the square of the active range; flat segments cost O(1).
CrossProb cross_prob_iid(const BoundaryVector& bounds);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Monte-Carlo estimate of the same probability with binomial standard error.
// Per-simulation counter-based streams make the result independent of
// evaluation order.
McEstimate cross_prob_mc(const BoundaryVector& bounds, std::int64_t n_sims,
                         std::uint64_t seed);

}  // namespace ggof
