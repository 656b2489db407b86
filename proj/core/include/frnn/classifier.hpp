#ifndef FRNN_CLASSIFIER_HPP
#define FRNN_CLASSIFIER_HPP

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "frnn/dataset.hpp"
#include "frnn/owa.hpp"
#include "frnn/relations.hpp"

namespace frnn {

struct ClassScore {
    double lower = 0;  // OWA soft-min of 1 - R(y, v) over y outside the class
    double upper = 0;  // OWA soft-max of R(y, v) over y inside the class
    double total = 0;  // lower + upper
};

using ClassScores = std::vector<ClassScore>;

/// OWA-based fuzzy-rough nearest neighbours in the crisp-class form: a test
/// point is assigned to the class maximising lower + upper approximation
/// membership. No training-time optimisation happens; fit only validates and
/// indexes the training data.
///
/// For the asymmetric class-specific relation the training sample is always
/// the first (class-bearing) argument: R(y, v) with the class of y.
class FrnnModel {
public:
    /// Per-class lower/upper/total scores for a query vector.
    ClassScores class_scores(const Eigen::VectorXd& v) const;

    /// argmax of the class totals; ties break toward the lowest class index.
    int predict(const Eigen::VectorXd& v) const;

    int k() const { return k_; }
    int n_classes() const { return static_cast<int>(members_.size()); }
    const IndiscernibilityRelation& relation() const { return *relation_; }

private:
    friend FrnnModel fit(const DecisionSystem& train,
                         std::shared_ptr<const IndiscernibilityRelation> relation, int k);
    FrnnModel() = default;

    Eigen::MatrixXd train_features_;
    std::vector<int> train_classes_;
    std::shared_ptr<const IndiscernibilityRelation> relation_;
    int k_ = 0;
    OwaWeightVector upper_weights_;
    OwaWeightVector lower_weights_;
    std::vector<std::vector<Eigen::Index>> members_;     // rows per class
    std::vector<std::vector<Eigen::Index>> complements_; // rows outside each class
};

/// Validates and assembles a model. Requires k >= 1, every class and every
/// class complement to hold at least k training samples, and the relation
/// dimension to match the training features. Throws std::invalid_argument
/// otherwise.
FrnnModel fit(const DecisionSystem& train,
              std::shared_ptr<const IndiscernibilityRelation> relation, int k);

} // namespace frnn

#endif
