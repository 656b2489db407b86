#ifndef FRNN_RELATIONS_HPP
#define FRNN_RELATIONS_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "frnn/dataset.hpp"

namespace frnn {

enum class DistanceKind {
    Manhattan,
    Euclidean,
    Chebyshev,
    Canberra,
    CosineDistance,
    PccDistance,
    Mahalanobis,
    ClassSpecificMahalanobis,
};

/// Config-string names: man, euc, che, can, cos, pcc, mah, csmbr.
std::optional<DistanceKind> distance_kind_from_string(std::string_view name);
std::string_view to_string(DistanceKind kind);

/// Elementary distances. Vectors must have equal length.
double manhattan_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double euclidean_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double chebyshev_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// Summands with |x_i| + |y_i| = 0 contribute 0.
double canberra_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// 1 - x.y / (|x||y|); defined as 1 when either vector is zero.
double cosine_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// Cosine distance of the vectors centered by the given per-feature
/// averages; defined as 1 when a centered vector has zero variance.
double pcc_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& averages);
/// sqrt((x-y)^T M (x-y)) with M the inverse covariance matrix.
double mahalanobis_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::MatrixXd& inverse_covariance);

/// Unbiased (n-1) sample covariance of the rows.
Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& rows);

/// Inverse of a symmetric positive-definite covariance matrix, or nullopt
/// when it is singular (non-positive eigenvalue or condition number > 1e12).
std::optional<Eigen::MatrixXd> invert_covariance(const Eigen::MatrixXd& covariance);

/// A fuzzy indiscernibility relation R: pairs of feature vectors -> [0,1].
/// Reflexive for defined self-distances; symmetric for every kind except the
/// class-specific Mahalanobis relation, whose value depends on the class of
/// its first argument.
class IndiscernibilityRelation {
public:
    virtual ~IndiscernibilityRelation() = default;

    /// Similarity with the class of the first argument supplied. Symmetric
    /// relations ignore first_class; the class-specific relation selects its
    /// per-class matrix and scale with it.
    virtual double evaluate(int first_class, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) const = 0;

    /// Unlabeled evaluation. Throws std::invalid_argument for asymmetric
    /// relations, which need the class of the first argument.
    double evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    virtual bool symmetric() const { return true; }
    virtual Eigen::Index dimension() const = 0;
    virtual std::string name() const = 0;
};

/// Distance-based relation R(x,y) = clamp(1 - d(x,y)/scale, 0, 1) for the
/// symmetric kinds of Table-style distance catalogues. Context (PCC feature
/// averages, Mahalanobis inverse covariance) is fixed at construction.
class DistanceRelation final : public IndiscernibilityRelation {
public:
    /// Manhattan/Euclidean/Chebyshev/Canberra/Cosine.
    DistanceRelation(DistanceKind kind, Eigen::Index dimension, double scale);
    /// PCC with the given per-feature training averages.
    DistanceRelation(Eigen::VectorXd feature_averages, double scale);
    /// Mahalanobis with the given inverse covariance matrix.
    DistanceRelation(Eigen::MatrixXd inverse_covariance, double scale);

    double evaluate(int first_class, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) const override;
    Eigen::Index dimension() const override { return dimension_; }
    std::string name() const override;

    /// The unscaled distance d(x,y).
    double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    DistanceKind kind() const { return kind_; }
    double scale() const { return scale_; }

private:
    DistanceKind kind_;
    Eigen::Index dimension_;
    double scale_;
    Eigen::VectorXd averages_;           // PCC only
    Eigen::MatrixXd inverse_covariance_; // Mahalanobis only
};

/// Class-specific Mahalanobis relation: R(x,y) = 1 - d_C(x,y)/scale_C with C
/// the class of the first argument. Asymmetric in general. Classes whose
/// covariance cannot be estimated fall back to the global matrix and scale.
class CsmbrRelation final : public IndiscernibilityRelation {
public:
    /// Builds directly from per-class covariance matrices and scales
    /// (class index = position). Throws RelationUndefinedError when a
    /// covariance is singular.
    static CsmbrRelation from_covariances(const std::vector<Eigen::MatrixXd>& class_covariances,
                                          const std::vector<double>& class_scales);

    double evaluate(int first_class, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) const override;
    bool symmetric() const override { return false; }
    Eigen::Index dimension() const override { return dimension_; }
    std::string name() const override { return "csmbr"; }

    /// True for classes that use the global fallback matrix and scale.
    const std::vector<bool>& fallback_classes() const { return fallback_; }

private:
    friend CsmbrRelation build_csmbr(const DecisionSystem& train);
    CsmbrRelation() = default;

    Eigen::Index dimension_ = 0;
    std::vector<Eigen::MatrixXd> inverse_covariances_; // per class
    std::vector<double> scales_;                       // per class
    std::vector<bool> fallback_;
};

/// Builds a relation of the given kind on (range-normalized) training data.
/// Scales follow the theoretical maxima (Manhattan n, Euclidean sqrt(n),
/// Chebyshev 1, Canberra n, cosine 2, PCC 2); the Mahalanobis scale is the
/// maximal pairwise training distance. Throws RelationUndefinedError when a
/// required covariance matrix is singular.
std::unique_ptr<IndiscernibilityRelation> build_relation(DistanceKind kind,
                                                         const DecisionSystem& train);

/// Class-specific Mahalanobis relation from training data: per-class
/// covariance and max in-class pairwise scale; classes with at most
/// n_features samples or a singular class covariance use the global
/// covariance and global scale instead. Throws RelationUndefinedError only
/// when the global covariance is needed and itself singular.
CsmbrRelation build_csmbr(const DecisionSystem& train);

} // namespace frnn

#endif
