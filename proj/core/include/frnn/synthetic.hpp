#ifndef FRNN_SYNTHETIC_HPP
#define FRNN_SYNTHETIC_HPP

#include <cstdint>

#include "frnn/dataset.hpp"

namespace frnn {

/// Two isotropic unit-variance Gaussian classes with alternating labels
/// (sample i gets class i mod 2). Class 0 is centred at the origin, class 1
/// at (separation, 0, ..., 0), so the class means are `separation` standard
/// deviations apart. Deterministic in the seed.
DecisionSystem synthetic_gaussians(int n_samples, int n_features, double separation,
                                   std::uint64_t seed);

/// Uniform random features in [0,1]^n_features with classes dealt
/// round-robin (sample i gets class i mod n_classes). Distance ties between
/// distinct points have probability zero. Deterministic in the seed.
DecisionSystem synthetic_uniform(int n_samples, int n_features, int n_classes,
                                 std::uint64_t seed);

} // namespace frnn

#endif
