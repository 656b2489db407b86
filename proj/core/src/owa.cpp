#include "frnn/owa.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace frnn {

OwaWeightVector linear_upper_weights(int k) {
    if (k < 1) throw std::invalid_argument("linear_upper_weights: k must be >= 1");
    OwaWeightVector w;
    w.orientation = OwaOrientation::SoftMax;
    w.weights.resize(static_cast<std::size_t>(k));
    const double denom = static_cast<double>(k) * (k + 1);
    for (int i = 1; i <= k; ++i) {
        w.weights[static_cast<std::size_t>(i - 1)] = 2.0 * (k + 1 - i) / denom;
    }
    return w;
}

OwaWeightVector linear_lower_weights(int k) {
    if (k < 1) throw std::invalid_argument("linear_lower_weights: k must be >= 1");
    OwaWeightVector w;
    w.orientation = OwaOrientation::SoftMin;
    w.weights.resize(static_cast<std::size_t>(k));
    const double denom = static_cast<double>(k) * (k + 1);
    for (int i = 1; i <= k; ++i) {
        w.weights[static_cast<std::size_t>(i - 1)] = 2.0 * i / denom;
    }
    return w;
}

double owa_aggregate(std::span<const double> values, const OwaWeightVector& w) {
    const std::size_t k = w.weights.size();
    if (k == 0) throw std::invalid_argument("owa_aggregate: empty weight vector");
    if (values.size() < k) {
        throw std::invalid_argument("owa_aggregate: fewer values than weights");
    }

    std::vector<double> sorted(values.begin(), values.end());
    if (w.orientation == OwaOrientation::SoftMax) {
        // Top k, descending; weights are stored largest-first.
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         sorted.end(), std::greater<>());
        std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k),
                  std::greater<>());
        double acc = 0;
        for (std::size_t i = 0; i < k; ++i) acc += w.weights[i] * sorted[i];
        return acc;
    }
    // Bottom k, ascending; the stored weights grow with the index, so
    // reversing them puts the largest weight on the minimum.
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end());
    std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k));
    double acc = 0;
    for (std::size_t i = 0; i < k; ++i) acc += w.weights[k - 1 - i] * sorted[i];
    return acc;
}

} // namespace frnn
