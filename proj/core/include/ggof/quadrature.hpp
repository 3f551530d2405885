#pragma once

#include <vector>

namespace ggof {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Computed by Newton iteration on P_n; results are cached per order.
const GaussLegendreRule& gauss_legendre(int order);

}  // namespace ggof
