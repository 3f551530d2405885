#pragma once

#include <span>
#include <string>
#include <vector>

namespace ggof {

// A goodness-of-fit statistic is sup over a truncation region of a kernel
// f(i/n, P_(i)) that is strictly decreasing in its second argument.
enum class FamilyKind {
    PhiDivergence,  // one-sided signed sqrt(2n f_s), s is the family index
    KsPlus,         // x - y
    Bonferroni,     // alpha/n - y
    Fdr,            // alpha*x - y
};

struct StatFamily {
    FamilyKind kind = FamilyKind::PhiDivergence;
    double s = 2.0;        // phi-divergence index
    double alpha = 0.05;   // level for Bonferroni/FDR kernels

    static StatFamily phi_divergence(double s) { return {FamilyKind::PhiDivergence, s, 0.0}; }
    static StatFamily hc2004() { return phi_divergence(2.0); }
    static StatFamily hc2008() { return phi_divergence(-1.0); }
    static StatFamily berk_jones() { return phi_divergence(1.0); }
    static StatFamily reverse_berk_jones() { return phi_divergence(0.0); }
    static StatFamily ks_plus() { return {FamilyKind::KsPlus, 0.0, 0.0}; }
    static StatFamily bonferroni(double alpha) { return {FamilyKind::Bonferroni, 0.0, alpha}; }
    static StatFamily fdr(double alpha) { return {FamilyKind::Fdr, 0.0, alpha}; }

    std::string name() const;
};

// Restriction of the supremum to ranks k0..k1 (1-based, inclusive) and
// p-value magnitudes [alpha0, alpha1].
struct TruncationScheme {
    int k0 = 1;
    int k1 = 0;  // 0 means "n" (resolved against the data length)
    double alpha0 = 0.0;
    double alpha1 = 1.0;

    static TruncationScheme full() { return {}; }
    static TruncationScheme index_range(int k0, int k1) { return {k0, k1, 0.0, 1.0}; }

    int resolved_k1(int n) const { return k1 <= 0 ? n : k1; }
    void validate(int n) const;
};

struct GofResult {
    double statistic = 0.0;
    StatFamily family;
    TruncationScheme trunc;
    int n = 0;
    int argmax_index = 0;  // 1-based rank attaining the supremum
};

// Kernel value f(x, y). Inputs are clamped to [1e-15, 1-1e-15] first; the
// phi-divergence kernels diverge at y in {0,1}.
double f_eval(const StatFamily& family, double x, double y, int n);

// Unique y with f(x, y) = b, clamped to [0, 1]. Returns 0 when f(x, .) < b
// everywhere and 1 when f(x, .) > b everywhere.
double f_inverse(const StatFamily& family, double x, double b, int n);

// Sorts the p-values and maximises the kernel over the truncation region.
// Throws EmptyRegionError when both filters leave no index.
GofResult compute_statistic(std::span<const double> pvalues,
                            const StatFamily& family,
                            const TruncationScheme& trunc);

// Per-rank boundaries u_i = f^{-1}(i/n, b) inside the index range, 0 outside.
// Magnitude truncation zeroes boundaries below alpha0 and caps them at alpha1.
std::vector<double> rejection_boundary(const StatFamily& family,
                                       const TruncationScheme& trunc,
                                       int n, double b);

}  // namespace ggof
