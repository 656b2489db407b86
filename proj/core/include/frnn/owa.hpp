#ifndef FRNN_OWA_HPP
#define FRNN_OWA_HPP

#include <span>
#include <vector>

namespace frnn {

/// Which end of the sorted value list an OWA weight vector emphasises.
/// SoftMax concentrates weight on the largest values (upper approximation),
/// SoftMin on the smallest (lower approximation).
enum class OwaOrientation { SoftMax, SoftMin };

/// The k nonzero weights of a truncated OWA operator. Weights sum to 1.
///
/// For SoftMax the entries are stored largest-first and apply to the k
/// largest values in descending order. For SoftMin the entries are stored as
/// generated, smallest-first; aggregation applies them reversed over the k
/// smallest values so that the largest weight multiplies the minimum.
struct OwaWeightVector {
    std::vector<double> weights;
    OwaOrientation orientation;

    int k() const { return static_cast<int>(weights.size()); }
};

/// Linear soft-max weights w_i = 2(k+1-i) / (k(k+1)), i = 1..k.
OwaWeightVector linear_upper_weights(int k);

/// Linear soft-min weights w_i = 2i / (k(k+1)), i = 1..k. The last (largest)
/// entry attaches to the smallest aggregated value.
OwaWeightVector linear_lower_weights(int k);

/// Weighted aggregate of the top-k (SoftMax) or bottom-k (SoftMin) values.
/// Requires |values| >= k. Result lies in [min(values), max(values)].
double owa_aggregate(std::span<const double> values, const OwaWeightVector& w);

} // namespace frnn

#endif
