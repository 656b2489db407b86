#include "frnn/classifier.hpp"

#include <stdexcept>

namespace frnn {

FrnnModel fit(const DecisionSystem& train,
              std::shared_ptr<const IndiscernibilityRelation> relation, int k) {
    if (!relation) throw std::invalid_argument("fit: relation is null");
    if (k < 1) throw std::invalid_argument("fit: k must be >= 1");
    if (relation->dimension() != train.n_features()) {
        throw std::invalid_argument("fit: relation dimension does not match the training data");
    }
    if (train.n_classes() < 2) throw std::invalid_argument("fit: need at least two classes");

    FrnnModel model;
    model.train_features_ = train.features;
    model.train_classes_ = train.classes;
    model.relation_ = std::move(relation);
    model.k_ = k;
    model.upper_weights_ = linear_upper_weights(k);
    model.lower_weights_ = linear_lower_weights(k);

    const auto n_classes = static_cast<std::size_t>(train.n_classes());
    model.members_.resize(n_classes);
    model.complements_.resize(n_classes);
    for (std::size_t i = 0; i < train.classes.size(); ++i) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            if (train.classes[i] == static_cast<int>(c)) {
                model.members_[c].push_back(static_cast<Eigen::Index>(i));
            } else {
                model.complements_[c].push_back(static_cast<Eigen::Index>(i));
            }
        }
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (model.members_[c].size() < static_cast<std::size_t>(k)) {
            throw std::invalid_argument("fit: class '" + train.class_names[c] + "' has " +
                                        std::to_string(model.members_[c].size()) +
                                        " training samples, fewer than k = " + std::to_string(k));
        }
        if (model.complements_[c].size() < static_cast<std::size_t>(k)) {
            throw std::invalid_argument("fit: the complement of class '" + train.class_names[c] +
                                        "' has fewer than k = " + std::to_string(k) + " samples");
        }
    }
    return model;
}

ClassScores FrnnModel::class_scores(const Eigen::VectorXd& v) const {
    if (v.size() != train_features_.cols()) {
        throw std::invalid_argument("class_scores: query dimension does not match the model");
    }
    const Eigen::Index n = train_features_.rows();

    // One relation evaluation per training row; the training sample is the
    // first (class-bearing) argument, which the class-specific relation needs.
    std::vector<double> similarity(static_cast<std::size_t>(n));
    Eigen::VectorXd row(train_features_.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        row = train_features_.row(i).transpose();
        similarity[static_cast<std::size_t>(i)] =
            relation_->evaluate(train_classes_[static_cast<std::size_t>(i)], row, v);
    }

    ClassScores scores(members_.size());
    std::vector<double> values;
    for (std::size_t c = 0; c < members_.size(); ++c) {
        values.clear();
        for (Eigen::Index i : members_[c]) values.push_back(similarity[static_cast<std::size_t>(i)]);
        scores[c].upper = owa_aggregate(values, upper_weights_);

        values.clear();
        for (Eigen::Index i : complements_[c]) {
            values.push_back(1.0 - similarity[static_cast<std::size_t>(i)]);
        }
        scores[c].lower = owa_aggregate(values, lower_weights_);
        scores[c].total = scores[c].lower + scores[c].upper;
    }
    return scores;
}

int FrnnModel::predict(const Eigen::VectorXd& v) const {
    const ClassScores scores = class_scores(v);
    int best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c].total > scores[static_cast<std::size_t>(best)].total) {
            best = static_cast<int>(c);
        }
    }
    return best;
}

} // namespace frnn
