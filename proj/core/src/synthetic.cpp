#include "frnn/synthetic.hpp"

#include <stdexcept>
#include <string>

#include "frnn/rng.hpp"

namespace frnn {

DecisionSystem synthetic_gaussians(int n_samples, int n_features, double separation,
                                   std::uint64_t seed) {
    if (n_samples < 2 || n_features < 1) {
        throw std::invalid_argument("synthetic_gaussians: need >= 2 samples and >= 1 feature");
    }
    DecisionSystem ds;
    ds.class_names = {"0", "1"};
    for (int j = 0; j < n_features; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    ds.features.resize(n_samples, n_features);
    ds.classes.resize(static_cast<std::size_t>(n_samples));

    std::mt19937_64 rng(seed);
    // Labels alternate so every prefix of the sample list stays balanced;
    // noise is drawn feature by feature, then class 1 is shifted.
    for (int i = 0; i < n_samples; ++i) ds.classes[static_cast<std::size_t>(i)] = i % 2;
    for (int j = 0; j < n_features; ++j) {
        for (int i = 0; i < n_samples; ++i) ds.features(i, j) = standard_normal(rng);
    }
    for (int i = 0; i < n_samples; ++i) {
        if (ds.classes[static_cast<std::size_t>(i)] == 1) ds.features(i, 0) += separation;
    }
    return ds;
}

DecisionSystem synthetic_uniform(int n_samples, int n_features, int n_classes,
                                 std::uint64_t seed) {
    if (n_samples < n_classes || n_classes < 2 || n_features < 1) {
        throw std::invalid_argument("synthetic_uniform: invalid shape");
    }
    DecisionSystem ds;
    for (int c = 0; c < n_classes; ++c) ds.class_names.push_back(std::to_string(c));
    for (int j = 0; j < n_features; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    ds.features.resize(n_samples, n_features);
    ds.classes.resize(static_cast<std::size_t>(n_samples));

    std::mt19937_64 rng(seed);
    for (int i = 0; i < n_samples; ++i) {
        ds.classes[static_cast<std::size_t>(i)] = i % n_classes;
        for (int j = 0; j < n_features; ++j) ds.features(i, j) = uniform_unit(rng);
    }
    return ds;
}

} // namespace frnn
