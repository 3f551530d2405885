#include "ggof/stat_family.hpp"

#include <algorithm>
#include <cmath>

#include "ggof/errors.hpp"

namespace ggof {

namespace {

constexpr double kClamp = 1e-15;

double clamp01(double v) {
    return std::min(1.0 - kClamp, std::max(kClamp, v));
}

// Divergence part of the phi family, Jager-Wellner style; nonnegative,
// zero iff y == x. s = 1 and s = 0 are the log-limit forms.
double phi_div(double s, double x, double y) {
    const double lx = std::log(x);
    const double ly = std::log(y);
    const double l1x = std::log1p(-x);
    const double l1y = std::log1p(-y);
    double v;
    if (s == 1.0) {
        v = x * (lx - ly) + (1.0 - x) * (l1x - l1y);
    } else if (s == 0.0) {
        v = y * (ly - lx) + (1.0 - y) * (l1y - l1x);
    } else {
        const double t1 = std::exp(s * lx + (1.0 - s) * ly);
        const double t2 = std::exp(s * l1x + (1.0 - s) * l1y);
        v = (1.0 - t1 - t2) / (s * (1.0 - s));
    }
    // Roundoff can push the divergence a hair below zero near y == x.
    return v < 0.0 ? 0.0 : v;
}

double phi_signed(double s, double x, double y, int n) {
    const double root = std::sqrt(2.0 * n * phi_div(s, x, y));
    return y <= x ? root : -root;
}

// Solve f(x, y) = b for the phi family by bisection on y; f is strictly
// decreasing in y so the bracket is always valid.
double phi_inverse_bisect(double s, double x, double b, int n) {
    double lo = kClamp;
    double hi = 1.0 - kClamp;
    if (phi_signed(s, x, lo, n) < b) return 0.0;
    if (phi_signed(s, x, hi, n) > b) return 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (phi_signed(s, x, mid, n) > b) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Closed-form inverse for s = 2 (the HC2004 kernel sqrt(n)(x-y)/sqrt(y(1-y))):
// (1+c) y^2 - (2x+c) y + x^2 = 0 with c = b^2/n.
double hc2004_inverse(double x, double b, int n) {
    if (b == 0.0) return x;
    const double c = b * b / n;
    const double disc = c * (c + 4.0 * x * (1.0 - x));
    const double root = std::sqrt(disc);
    double y;
    if (b > 0.0) {
        y = (2.0 * x + c - root) / (2.0 * (1.0 + c));
    } else {
        y = (2.0 * x + c + root) / (2.0 * (1.0 + c));
    }
    return std::min(1.0, std::max(0.0, y));
}

// s = -1 (HC2008, sqrt(n)(x-y)/sqrt(x(1-x))) inverts linearly.
double hc2008_inverse(double x, double b, int n) {
    const double y = x - b * std::sqrt(x * (1.0 - x) / n);
    return std::min(1.0, std::max(0.0, y));
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " is not finite");
}

}  // namespace

std::string StatFamily::name() const {
    switch (kind) {
        case FamilyKind::KsPlus:
            return "ks+";
        case FamilyKind::Bonferroni:
            return "bonferroni(" + std::to_string(alpha) + ")";
        case FamilyKind::Fdr:
            return "fdr(" + std::to_string(alpha) + ")";
        case FamilyKind::PhiDivergence:
            if (s == 2.0) return "hc2004";
            if (s == -1.0) return "hc2008";
            if (s == 1.0) return "bj";
            if (s == 0.0) return "rbj";
            return "phi(" + std::to_string(s) + ")";
    }
    return "?";
}

void TruncationScheme::validate(int n) const {
    const int kk1 = resolved_k1(n);
    if (k0 < 1 || kk1 > n || k0 > kk1) {
        throw DomainError("invalid truncation indices: k0=" + std::to_string(k0) +
                          " k1=" + std::to_string(kk1) + " n=" + std::to_string(n));
    }
    if (!(alpha0 >= 0.0) || !(alpha1 <= 1.0) || alpha0 > alpha1) {
        throw DomainError("invalid truncation magnitudes: alpha0=" + std::to_string(alpha0) +
                          " alpha1=" + std::to_string(alpha1));
    }
}

double f_eval(const StatFamily& family, double x, double y, int n) {
    check_finite(x, "x");
    check_finite(y, "y");
    if (n < 1) throw DomainError("n must be >= 1");
    x = clamp01(x);
    y = clamp01(y);
    double v = 0.0;
    switch (family.kind) {
        case FamilyKind::KsPlus:
            v = x - y;
            break;
        case FamilyKind::Bonferroni:
            v = family.alpha / n - y;
            break;
        case FamilyKind::Fdr:
            v = family.alpha * x - y;
            break;
        case FamilyKind::PhiDivergence:
            v = phi_signed(family.s, x, y, n);
            break;
    }
    if (!std::isfinite(v)) {
        throw DomainError("kernel value is not finite (family " + family.name() +
                          ", s=" + std::to_string(family.s) + ")");
    }
    return v;
}

double f_inverse(const StatFamily& family, double x, double b, int n) {
    check_finite(x, "x");
    check_finite(b, "b");
    if (n < 1) throw DomainError("n must be >= 1");
    x = clamp01(x);
    switch (family.kind) {
        case FamilyKind::KsPlus:
            return std::min(1.0, std::max(0.0, x - b));
        case FamilyKind::Bonferroni:
            return std::min(1.0, std::max(0.0, family.alpha / n - b));
        case FamilyKind::Fdr:
            return std::min(1.0, std::max(0.0, family.alpha * x - b));
        case FamilyKind::PhiDivergence:
            if (family.s == 2.0) return hc2004_inverse(x, b, n);
            if (family.s == -1.0) return hc2008_inverse(x, b, n);
            return phi_inverse_bisect(family.s, x, b, n);
    }
    throw DomainError("unknown family");
}

GofResult compute_statistic(std::span<const double> pvalues,
                            const StatFamily& family,
                            const TruncationScheme& trunc) {
    const int n = static_cast<int>(pvalues.size());
    if (n < 1) throw DomainError("need at least one p-value");
    trunc.validate(n);
    for (double p : pvalues) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw DomainError("p-values must lie in [0,1]");
        }
    }
    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::stable_sort(sorted.begin(), sorted.end());

    const int k1 = trunc.resolved_k1(n);
    GofResult result;
    result.family = family;
    result.trunc = trunc;
    result.n = n;
    bool any = false;
    for (int i = trunc.k0; i <= k1; ++i) {
        const double p = sorted[i - 1];
        if (p < trunc.alpha0 || p > trunc.alpha1) continue;
        const double v = f_eval(family, static_cast<double>(i) / n, p, n);
        if (!any || v > result.statistic) {
            result.statistic = v;
            result.argmax_index = i;
        }
        any = true;
    }
    if (!any) {
        throw EmptyRegionError("truncation region is empty: no ordered p-value satisfies "
                               "both the index and magnitude filters");
    }
    return result;
}

std::vector<double> rejection_boundary(const StatFamily& family,
                                       const TruncationScheme& trunc,
                                       int n, double b) {
    if (n < 1) throw DomainError("n must be >= 1");
    trunc.validate(n);
    std::vector<double> u(n, 0.0);
    const int k1 = trunc.resolved_k1(n);
    for (int i = trunc.k0; i <= k1; ++i) {
        double v = f_inverse(family, static_cast<double>(i) / n, b, n);
        // A p-value below alpha0 is excluded from the supremum, so it cannot
        // trigger rejection through this rank; above alpha1 likewise.
        if (v < trunc.alpha0) {
            v = 0.0;
        } else {
            v = std::min(v, trunc.alpha1);
        }
        u[i - 1] = v;
    }
    return u;
}

}  // namespace ggof
