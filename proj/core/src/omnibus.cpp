#include "ggof/omnibus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "ggof/errors.hpp"
#include "ggof/rng.hpp"

namespace ggof {

namespace {

constexpr std::uint64_t kEntryTag = 0xE27;

// Entries must see the same engine randomness in diggof_statistic and in the
// inversions inside diggof_pvalue.
PvalueOptions entry_options(const PvalueOptions& opts, int entry_index) {
    PvalueOptions out = opts;
    out.seed = stream_key(opts.seed, substream(kEntryTag, static_cast<std::uint64_t>(entry_index)));
    return out;
}

double entry_survival(double b, const GridEntry& entry, const CorrelationModel& corr,
                      const PvalueOptions& opts, EngineWarnings* warnings) {
    const Method method = resolve_method(opts.method, corr);
    switch (method) {
        case Method::Iid:
            return survival_iid(b, entry.family, entry.trunc, corr.n(), warnings);
        case Method::Equal:
            return survival_equal_corr(b, entry.family, entry.trunc, corr.n(), corr.rho(),
                                       opts.sided, opts.quad, warnings);
        case Method::Wam:
            return survival_wam(b, entry.family, entry.trunc, corr, opts.wam_alpha,
                                opts.sided, opts.quad, warnings);
        case Method::Loess:
            return survival_loess(b, entry.family, entry.trunc, corr, opts.loess,
                                  opts.sided, opts.seed, opts.quad, warnings);
        case Method::Mc: {
            GofResult pseudo;
            pseudo.statistic = b;
            pseudo.family = entry.family;
            pseudo.trunc = entry.trunc;
            pseudo.n = corr.n();
            return 1.0 - pvalue(pseudo, corr, opts, warnings);
        }
        case Method::Auto:
            break;
    }
    throw DomainError("unresolved engine");
}

// Invert a monotone survival on b: bracket expansion, then Illinois-weighted
// regula falsi with a bisection safeguard, stopping at `ftol` in probability.
// `clamped` reports an unreachable target.
ThresholdResult invert_monotone(const std::function<double(double)>& cdf, double target,
                                double ftol = 1e-8, double lo = -10.0, double hi = 10.0) {
    double flo = cdf(lo), fhi = cdf(hi);
    double step = std::max(1.0, hi - lo);
    int guard = 0;
    while (fhi < target && hi < 1e12 && guard++ < 90) {
        lo = hi;
        flo = fhi;
        hi += step;
        step *= 2.0;
        fhi = cdf(hi);
    }
    step = std::max(1.0, hi - lo);
    guard = 0;
    while (flo > target && lo > -1e12 && guard++ < 90) {
        hi = lo;
        fhi = flo;
        lo -= step;
        step *= 2.0;
        flo = cdf(lo);
    }
    if (fhi < target) return {hi, true};   // conservative: keep the larger b
    if (flo > target) return {lo, true};

    double fl = flo - target, fh = fhi - target;  // fl <= 0 <= fh
    double fl_used = fl, fh_used = fh;
    int side = 0;
    for (int iter = 0; iter < 200; ++iter) {
        if (fh - fl <= ftol || hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) break;
        double x = fh_used != fl_used
                       ? (lo * fh_used - hi * fl_used) / (fh_used - fl_used)
                       : 0.5 * (lo + hi);
        const double margin = 1e-3 * (hi - lo);
        if (!(x > lo + margin && x < hi - margin)) x = 0.5 * (lo + hi);
        const double fx = cdf(x) - target;
        if (fx >= 0.0) {
            hi = x;
            fh = fx;
            fh_used = fx;
            if (side == 1) fl_used *= 0.5;
            side = 1;
        } else {
            lo = x;
            fl = fx;
            fl_used = fx;
            if (side == -1) fh_used *= 0.5;
            side = -1;
        }
    }
    const double b = 0.5 * (lo + hi);
    // A CDF jump can leave the target unattainable; report the conservative
    // endpoint in that case.
    if (fh - fl > std::max(1e-6, ftol) &&
        hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
        return {hi, true};
    }
    return {b, false};
}

// Every off-diagonal entry, clamped at zero: the exact (zero-variance) limit
// of the near-diagonal-weighted sampling design. Noise in the per-entry
// inversions would bias the pointwise boundary maximum upward, so the probe
// curves use the full enumeration.
std::vector<double> enumerate_offdiagonals(const CorrelationModel& corr,
                                           EngineWarnings* warnings) {
    const int n = corr.n();
    std::vector<double> rhos;
    rhos.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            double rho = corr.entry(i, j);
            if (rho < 0.0) {
                rho = 0.0;
                if (warnings) ++warnings->clamped_rho;
            }
            rhos.push_back(rho);
        }
    }
    return rhos;
}

}  // namespace

std::string GridEntry::label() const {
    std::string s = family.name() + "[" + std::to_string(trunc.k0) + ",";
    s += trunc.k1 <= 0 ? std::string("n") : std::to_string(trunc.k1);
    s += "]";
    return s;
}

AdaptationGrid AdaptationGrid::default_grid(int n) {
    const int half = (n + 1) / 2;
    std::vector<int> k1s{half, n};
    if (k1s[0] == k1s[1]) k1s.pop_back();
    std::vector<int> k0s{1, 2};
    if (n < 2) k0s.pop_back();
    return cross({-1.0, 0.0, 1.0, 2.0}, k0s, k1s, n);
}

AdaptationGrid AdaptationGrid::cross(const std::vector<double>& s_values,
                                     const std::vector<int>& k0s,
                                     const std::vector<int>& k1s, int n) {
    AdaptationGrid grid;
    grid.n = n;
    for (double s : s_values) {
        for (int k0 : k0s) {
            for (int k1 : k1s) {
                if (k0 > k1) continue;
                grid.entries.push_back({StatFamily::phi_divergence(s),
                                        TruncationScheme::index_range(k0, k1)});
            }
        }
    }
    grid.validate();
    return grid;
}

void AdaptationGrid::validate() const {
    if (entries.empty()) throw DomainError("adaptation grid must be nonempty");
    for (const GridEntry& e : entries) e.trunc.validate(n);
}

OmnibusResult diggof_statistic(std::span<const double> pvalues,
                               const AdaptationGrid& grid,
                               const CorrelationModel& corr,
                               const PvalueOptions& opts,
                               EngineWarnings* warnings) {
    if (static_cast<int>(pvalues.size()) != grid.n) {
        throw DimensionError("p-value vector length does not match the grid's n");
    }
    grid.validate();
    OmnibusResult result;
    result.per_entry_pvalues.resize(grid.entries.size());
    for (size_t j = 0; j < grid.entries.size(); ++j) {
        const GridEntry& entry = grid.entries[j];
        const GofResult stat = compute_statistic(pvalues, entry.family, entry.trunc);
        const double p = pvalue(stat, corr, entry_options(opts, static_cast<int>(j)), warnings);
        result.per_entry_pvalues[j] = p;
        if (j == 0 || p < result.s_o) {
            result.s_o = p;
            result.chosen_entry = static_cast<int>(j);
        }
    }
    return result;
}

ThresholdResult critical_threshold(const GridEntry& entry, double target,
                                   const CorrelationModel& corr,
                                   const PvalueOptions& opts,
                                   EngineWarnings* warnings) {
    if (!(target > 0.0 && target < 1.0)) {
        throw DomainError("target survival level must lie in (0,1)");
    }
    return invert_monotone(
        [&](double b) { return entry_survival(b, entry, corr, opts, warnings); },
        1.0 - target);
}

double diggof_pvalue(const OmnibusResult& result, const AdaptationGrid& grid,
                     const CorrelationModel& corr, const OmnibusOptions& opts,
                     std::vector<double>* u_star_out, EngineWarnings* warnings) {
    grid.validate();
    const int n = grid.n;
    const double s_o = std::min(1.0 - 1e-12, std::max(1e-12, result.s_o));
    const Method method = resolve_method(opts.pv.method, corr);

    std::vector<double> u_star(static_cast<size_t>(n), 0.0);
    for (size_t j = 0; j < grid.entries.size(); ++j) {
        const GridEntry& entry = grid.entries[j];
        const PvalueOptions eopts = entry_options(opts.pv, static_cast<int>(j));
        double b_j;
        if (opts.fast_inversion && method == Method::Loess) {
            // Probe inversion on the enumerated off-diagonal mixture.
            const std::vector<double> rhos = enumerate_offdiagonals(corr, warnings);
            auto probe = [&](double b) {
                const std::vector<double> u =
                    rejection_boundary(entry.family, entry.trunc, n, b);
                return EqualCorrBoundary(u, eopts.sided, eopts.quad).mixture_mean(rhos);
            };
            // Seed the bracket from the cheap iid inverse; the dependent
            // curve sits near it, so Illinois converges in a few probes. The
            // probe curve carries sampling noise well above 1e-8, hence the
            // loose tolerance.
            const double guess =
                invert_monotone(
                    [&](double b) {
                        return survival_iid(b, entry.family, entry.trunc, n);
                    },
                    1.0 - s_o)
                    .b;
            b_j = invert_monotone(probe, 1.0 - s_o, 2e-5, guess - 1.0, guess + 1.0).b;
        } else {
            b_j = critical_threshold(entry, s_o, corr, eopts, warnings).b;
        }
        const std::vector<double> u_j = rejection_boundary(entry.family, entry.trunc, n, b_j);
        for (int i = 0; i < n; ++i) u_star[i] = std::max(u_star[i], u_j[i]);
    }

    if (u_star_out) *u_star_out = u_star;
    const double surv = boundary_survival(BoundaryVector::full(u_star), corr,
                                          opts.pv, warnings);
    return std::min(1.0, std::max(0.0, 1.0 - surv));
}

}  // namespace ggof
