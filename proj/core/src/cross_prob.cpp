#include "ggof/cross_prob.hpp"

#include <algorithm>
#include <cmath>

#include "ggof/errors.hpp"
#include "ggof/rng.hpp"

namespace ggof {

namespace {

constexpr double kBigScale = 1e300;
constexpr double kSmallScale = 1e-300;
constexpr double kLogSmall = 690.77552789821371;  // 300 * ln(10)
constexpr double kUnderflowCut = 1e-300;

// Distinct boundary level with its binding constraint: at most `max_below`
// uniforms may lie at or below `t`.
struct Level {
    double t;
    int max_below;
};

// One term of a binomial pmf row kept as f * (1e-300)^e so rows survive
// n ~ 1e4 without overflow or premature underflow.
struct Scaled {
    double f;
    int e;

    void renorm() {
        while (f != 0.0 && f < kSmallScale) {
            f *= kBigScale;
            ++e;
        }
        while (f > kBigScale) {
            f *= kSmallScale;
            --e;
        }
    }

    double collapse() const {
        if (e <= 0) return e == 0 ? f : f * kBigScale;  // e < 0 cannot happen for pmfs
        if (e == 1) return f * kSmallScale;             // denormal-range contribution
        return 0.0;
    }
};

Scaled scaled_from_log(double lg) {
    Scaled s{0.0, 0};
    if (lg == -std::numeric_limits<double>::infinity()) return s;
    while (lg < -690.0) {
        lg += kLogSmall;
        ++s.e;
    }
    s.f = std::exp(lg);
    return s;
}

std::vector<Level> build_levels(const BoundaryVector& bounds) {
    const int n = bounds.n;
    std::vector<Level> levels;
    double running = 0.0;
    for (int i = 1; i <= n; ++i) {
        double ci = bounds.c[i - 1];
        if (ci < 0.0) ci = 0.0;
        if (ci > running) {
            levels.push_back({ci, i - 1});
            running = ci;
        }
    }
    return levels;
}

}  // namespace

BoundaryVector BoundaryVector::full(std::vector<double> bounds) {
    BoundaryVector b;
    b.n = static_cast<int>(bounds.size());
    b.c = std::move(bounds);
    b.k0 = 1;
    b.k1 = b.n;
    return b;
}

BoundaryVector BoundaryVector::ranged(std::vector<double> bounds, int k0, int k1) {
    BoundaryVector b;
    b.n = static_cast<int>(bounds.size());
    b.c = std::move(bounds);
    b.k0 = k0;
    b.k1 = k1;
    return b;
}

CrossProb cross_prob_iid(const BoundaryVector& bounds) {
    const int n = bounds.n;
    if (n < 1 || static_cast<int>(bounds.c.size()) != n) {
        throw DimensionError("boundary vector length does not match n");
    }
    for (double ci : bounds.c) {
        if (std::isnan(ci)) throw DomainError("boundary contains NaN");
    }
    for (double ci : bounds.c) {
        if (ci >= 1.0) return {0.0, false};  // impossible event, not an error
    }

    const std::vector<Level> levels = build_levels(bounds);
    if (levels.empty()) return {1.0, false};  // vacuous constraints

    // state[j] = P(N(t) = j and all constraints so far hold), a genuine
    // probability, so plain doubles suffice; sub-1e-300 mass is what the
    // underflow flag reports. Scratch is reused across calls.
    thread_local std::vector<double> state;
    thread_local std::vector<double> next;
    state.assign(static_cast<size_t>(n) + 1, 0.0);
    next.assign(static_cast<size_t>(n) + 1, 0.0);

    // Reciprocal table avoids a division per transition term.
    thread_local std::vector<double> inv;
    if (static_cast<int>(inv.size()) < n + 2) {
        const int old = static_cast<int>(inv.size());
        inv.resize(static_cast<size_t>(n) + 2);
        for (int m = std::max(1, old); m < n + 2; ++m) inv[m] = 1.0 / m;
    }

    double t_prev = 0.0;
    int jmax_prev = 0;
    bool first = true;
    for (const Level& lev : levels) {
        const int jmax = std::min(lev.max_below, n);
        const double p = (lev.t - t_prev) / (1.0 - t_prev);
        const double q = 1.0 - p;
        const double odds = q > 0.0 ? p / q : 0.0;
        const double log_pmf0 = n * std::log1p(-p);
        const int kmax = first ? 0 : std::min(jmax_prev, jmax);
        // The plain-double path covers every level whose smallest row start
        // stays comfortably above the denormal range; the scaled path is the
        // fallback for extreme tails and very large n.
        const bool plain = q > 0.0 && log_pmf0 - kmax * std::log(q) > -600.0;

        if (!first) std::fill(next.begin(), next.begin() + jmax + 1, 0.0);
        double* dst = first ? state.data() : next.data();
        const double* src_row = state.data();

        if (plain) {
            double pmf0 = std::exp(log_pmf0);
            const double inv_q = 1.0 / q;
            for (int k = 0; k <= kmax; ++k) {
                if (k > 0) pmf0 *= inv_q;
                const double src = first ? 1.0 : src_row[k];
                if (src == 0.0) continue;
                const int trials = n - k;
                double pmf = pmf0;
                double peak = pmf;
                const int mmax = jmax - k;
                const double mode = (trials + 1) * p;
                dst[k] += src * pmf;
                for (int m = 1; m <= mmax; ++m) {
                    pmf *= (trials - m + 1) * inv[m] * odds;
                    if (m > mode) {
                        if (pmf < peak * 1e-18) break;
                    } else if (pmf > peak) {
                        peak = pmf;
                    }
                    dst[k + m] += src * pmf;
                }
            }
        } else {
            for (int k = 0; k <= kmax; ++k) {
                const double src = first ? 1.0 : src_row[k];
                if (src == 0.0) continue;
                const int trials = n - k;
                if (q <= 0.0) {
                    const int j = k + trials;
                    if (j <= jmax) dst[j] += src;
                    continue;
                }
                Scaled pmf = scaled_from_log(log_pmf0 - k * std::log(q));
                Scaled peak = pmf;
                const int mmax = jmax - k;
                const double mode = (trials + 1) * p;
                for (int m = 0; m <= mmax; ++m) {
                    if (m > 0) {
                        pmf.f *= (trials - m + 1) * inv[m] * odds;
                        pmf.renorm();
                        if (pmf.f == 0.0) break;
                        if (m > mode) {
                            if (pmf.e > peak.e ||
                                (pmf.e == peak.e && pmf.f < peak.f * 1e-18)) {
                                break;
                            }
                        } else if (pmf.e < peak.e ||
                                   (pmf.e == peak.e && pmf.f > peak.f)) {
                            peak = pmf;
                        }
                    }
                    const double term = pmf.collapse();
                    if (term != 0.0) dst[k + m] += src * term;
                }
            }
        }
        if (!first) std::swap(state, next);
        first = false;
        jmax_prev = jmax;
        t_prev = lev.t;
    }

    double total = 0.0;
    for (int j = 0; j <= jmax_prev; ++j) total += state[j];
    total = std::min(1.0, std::max(0.0, total));
    if (total < kUnderflowCut) {
        return {0.0, true};
    }
    return {total, false};
}

McEstimate cross_prob_mc(const BoundaryVector& bounds, std::int64_t n_sims,
                         std::uint64_t seed) {
    const int n = bounds.n;
    if (n < 1 || static_cast<int>(bounds.c.size()) != n) {
        throw DimensionError("boundary vector length does not match n");
    }
    if (n_sims < 1) throw DomainError("n_sims must be >= 1");
    const std::vector<Level> levels = build_levels(bounds);

    std::vector<double> draws(static_cast<size_t>(n));
    std::int64_t hits = 0;
    for (std::int64_t sim = 0; sim < n_sims; ++sim) {
        RngStream rng(seed, substream(0x6372700ULL, static_cast<std::uint64_t>(sim)));
        for (int i = 0; i < n; ++i) draws[i] = rng.uniform();
        bool ok = true;
        for (const Level& lev : levels) {
            int below = 0;
            for (int i = 0; i < n; ++i) below += draws[i] <= lev.t;
            if (below > lev.max_below) {
                ok = false;
                break;
            }
        }
        hits += ok;
    }
    const double est = static_cast<double>(hits) / static_cast<double>(n_sims);
    const double se = std::sqrt(est * (1.0 - est) / static_cast<double>(n_sims));
    return {est, se};
}

}  // namespace ggof
