#include "frnn/relations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "frnn/errors.hpp"

namespace frnn {
namespace {

void check_dimensions(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Eigen::Index expected) {
    if (x.size() != expected || y.size() != expected) {
        throw std::invalid_argument("relation evaluated on vectors of the wrong dimension");
    }
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// Largest pairwise distance between the rows under the given metric.
template <typename Distance>
double max_pairwise(const Eigen::MatrixXd& rows, Distance&& distance) {
    double best = 0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
            best = std::max(best, distance(rows.row(i).transpose(), rows.row(j).transpose()));
        }
    }
    return best;
}

} // namespace

std::optional<DistanceKind> distance_kind_from_string(std::string_view name) {
    if (name == "man") return DistanceKind::Manhattan;
    if (name == "euc") return DistanceKind::Euclidean;
    if (name == "che") return DistanceKind::Chebyshev;
    if (name == "can") return DistanceKind::Canberra;
    if (name == "cos") return DistanceKind::CosineDistance;
    if (name == "pcc") return DistanceKind::PccDistance;
    if (name == "mah") return DistanceKind::Mahalanobis;
    if (name == "csmbr") return DistanceKind::ClassSpecificMahalanobis;
    return std::nullopt;
}

std::string_view to_string(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::Manhattan: return "man";
        case DistanceKind::Euclidean: return "euc";
        case DistanceKind::Chebyshev: return "che";
        case DistanceKind::Canberra: return "can";
        case DistanceKind::CosineDistance: return "cos";
        case DistanceKind::PccDistance: return "pcc";
        case DistanceKind::Mahalanobis: return "mah";
        case DistanceKind::ClassSpecificMahalanobis: return "csmbr";
    }
    return "?";
}

double manhattan_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return (x - y).cwiseAbs().sum();
}

double euclidean_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return (x - y).norm();
}

double chebyshev_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return (x - y).cwiseAbs().maxCoeff();
}

double canberra_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double sum = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double denom = std::abs(x(i)) + std::abs(y(i));
        if (denom > 0) sum += std::abs(x(i) - y(i)) / denom;
    }
    return sum;
}

double cosine_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double nx = x.norm();
    const double ny = y.norm();
    if (nx == 0 || ny == 0) return 1.0;
    return 1.0 - x.dot(y) / (nx * ny);
}

double pcc_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& averages) {
    return cosine_distance(x - averages, y - averages);
}

double mahalanobis_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::MatrixXd& inverse_covariance) {
    const Eigen::VectorXd diff = x - y;
    const double q = diff.dot(inverse_covariance * diff);
    return std::sqrt(std::max(q, 0.0));
}

Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& rows) {
    const Eigen::Index n = rows.rows();
    if (n < 2) return Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    const Eigen::MatrixXd centered = rows.rowwise() - mean;
    return centered.transpose() * centered / static_cast<double>(n - 1);
}

std::optional<Eigen::MatrixXd> invert_covariance(const Eigen::MatrixXd& covariance) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd& eig = solver.eigenvalues(); // ascending
    const double min_eig = eig(0);
    const double max_eig = eig(eig.size() - 1);
    if (min_eig <= 0 || max_eig / min_eig > 1e12) return std::nullopt;
    return solver.eigenvectors() * eig.cwiseInverse().asDiagonal() *
           solver.eigenvectors().transpose();
}

double IndiscernibilityRelation::evaluate(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y) const {
    if (!symmetric()) {
        throw std::invalid_argument(name() +
                                    " needs the class of its first argument to be evaluated");
    }
    return evaluate(-1, x, y);
}

DistanceRelation::DistanceRelation(DistanceKind kind, Eigen::Index dimension, double scale)
    : kind_(kind), dimension_(dimension), scale_(scale) {
    switch (kind) {
        case DistanceKind::Manhattan:
        case DistanceKind::Euclidean:
        case DistanceKind::Chebyshev:
        case DistanceKind::Canberra:
        case DistanceKind::CosineDistance: break;
        default:
            throw std::invalid_argument(
                "DistanceRelation(kind, dimension, scale) only covers the context-free kinds");
    }
    if (scale <= 0) throw std::invalid_argument("relation scale must be positive");
    if (dimension < 1) throw std::invalid_argument("relation dimension must be >= 1");
}

DistanceRelation::DistanceRelation(Eigen::VectorXd feature_averages, double scale)
    : kind_(DistanceKind::PccDistance),
      dimension_(feature_averages.size()),
      scale_(scale),
      averages_(std::move(feature_averages)) {
    if (scale <= 0) throw std::invalid_argument("relation scale must be positive");
    if (dimension_ < 1) throw std::invalid_argument("relation dimension must be >= 1");
}

DistanceRelation::DistanceRelation(Eigen::MatrixXd inverse_covariance, double scale)
    : kind_(DistanceKind::Mahalanobis),
      dimension_(inverse_covariance.rows()),
      scale_(scale),
      inverse_covariance_(std::move(inverse_covariance)) {
    if (inverse_covariance_.rows() != inverse_covariance_.cols()) {
        throw std::invalid_argument("inverse covariance must be square");
    }
    if (scale <= 0) throw std::invalid_argument("relation scale must be positive");
    if (dimension_ < 1) throw std::invalid_argument("relation dimension must be >= 1");
}

double DistanceRelation::distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    check_dimensions(x, y, dimension_);
    switch (kind_) {
        case DistanceKind::Manhattan: return manhattan_distance(x, y);
        case DistanceKind::Euclidean: return euclidean_distance(x, y);
        case DistanceKind::Chebyshev: return chebyshev_distance(x, y);
        case DistanceKind::Canberra: return canberra_distance(x, y);
        case DistanceKind::CosineDistance: return cosine_distance(x, y);
        case DistanceKind::PccDistance: return pcc_distance(x, y, averages_);
        case DistanceKind::Mahalanobis: return mahalanobis_distance(x, y, inverse_covariance_);
        default: break;
    }
    throw std::logic_error("unreachable distance kind");
}

double DistanceRelation::evaluate(int, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return clamp_unit(1.0 - distance(x, y) / scale_);
}

std::string DistanceRelation::name() const { return std::string(to_string(kind_)); }

CsmbrRelation CsmbrRelation::from_covariances(const std::vector<Eigen::MatrixXd>& class_covariances,
                                              const std::vector<double>& class_scales) {
    if (class_covariances.size() < 2 || class_covariances.size() != class_scales.size()) {
        throw std::invalid_argument("from_covariances: need matched covariances and scales for >= 2 classes");
    }
    CsmbrRelation rel;
    rel.dimension_ = class_covariances.front().rows();
    for (std::size_t c = 0; c < class_covariances.size(); ++c) {
        auto inverse = invert_covariance(class_covariances[c]);
        if (!inverse) {
            throw RelationUndefinedError("class " + std::to_string(c) +
                                         " covariance matrix is singular");
        }
        if (class_scales[c] <= 0) throw std::invalid_argument("class scale must be positive");
        rel.inverse_covariances_.push_back(std::move(*inverse));
        rel.scales_.push_back(class_scales[c]);
        rel.fallback_.push_back(false);
    }
    return rel;
}

double CsmbrRelation::evaluate(int first_class, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) const {
    if (first_class < 0 || first_class >= static_cast<int>(inverse_covariances_.size())) {
        throw std::invalid_argument("csmbr evaluated without a valid class for its first argument");
    }
    check_dimensions(x, y, dimension_);
    const auto c = static_cast<std::size_t>(first_class);
    const double d = mahalanobis_distance(x, y, inverse_covariances_[c]);
    return clamp_unit(1.0 - d / scales_[c]);
}

std::unique_ptr<IndiscernibilityRelation> build_relation(DistanceKind kind,
                                                         const DecisionSystem& train) {
    const Eigen::Index n = train.n_features();
    switch (kind) {
        case DistanceKind::Manhattan:
            return std::make_unique<DistanceRelation>(kind, n, static_cast<double>(n));
        case DistanceKind::Euclidean:
            return std::make_unique<DistanceRelation>(kind, n, std::sqrt(static_cast<double>(n)));
        case DistanceKind::Chebyshev: return std::make_unique<DistanceRelation>(kind, n, 1.0);
        case DistanceKind::Canberra:
            return std::make_unique<DistanceRelation>(kind, n, static_cast<double>(n));
        case DistanceKind::CosineDistance: return std::make_unique<DistanceRelation>(kind, n, 2.0);
        case DistanceKind::PccDistance: {
            Eigen::VectorXd averages = train.features.colwise().mean();
            return std::make_unique<DistanceRelation>(std::move(averages), 2.0);
        }
        case DistanceKind::Mahalanobis: {
            auto inverse = invert_covariance(covariance_matrix(train.features));
            if (!inverse) {
                throw RelationUndefinedError("mahalanobis: training covariance matrix is singular");
            }
            // No closed-form maximum exists, so the divisor is the largest
            // observed pairwise training distance.
            const double scale =
                max_pairwise(train.features, [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                    return mahalanobis_distance(a, b, *inverse);
                });
            if (scale <= 0) {
                throw RelationUndefinedError("mahalanobis: all training samples coincide");
            }
            return std::make_unique<DistanceRelation>(std::move(*inverse), scale);
        }
        case DistanceKind::ClassSpecificMahalanobis:
            return std::make_unique<CsmbrRelation>(build_csmbr(train));
    }
    throw std::logic_error("unreachable relation kind");
}

CsmbrRelation build_csmbr(const DecisionSystem& train) {
    if (train.n_classes() < 2) {
        throw std::invalid_argument("csmbr needs at least two classes in the training data");
    }
    const Eigen::Index n_features = train.n_features();

    struct ClassPlan {
        std::optional<Eigen::MatrixXd> inverse;
        double scale = 0;
    };
    std::vector<ClassPlan> plans(static_cast<std::size_t>(train.n_classes()));
    bool any_fallback = false;

    for (int c = 0; c < train.n_classes(); ++c) {
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < train.classes.size(); ++i) {
            if (train.classes[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
        }
        auto& plan = plans[static_cast<std::size_t>(c)];
        // Too few samples to estimate a full-rank covariance for this class.
        if (static_cast<Eigen::Index>(rows.size()) <= n_features) {
            any_fallback = true;
            continue;
        }
        Eigen::MatrixXd class_rows(static_cast<Eigen::Index>(rows.size()), n_features);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            class_rows.row(static_cast<Eigen::Index>(i)) = train.features.row(rows[i]);
        }
        auto inverse = invert_covariance(covariance_matrix(class_rows));
        if (!inverse) {
            any_fallback = true;
            continue;
        }
        plan.scale = max_pairwise(class_rows, [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return mahalanobis_distance(a, b, *inverse);
        });
        if (plan.scale <= 0) {
            any_fallback = true;
            continue;
        }
        plan.inverse = std::move(*inverse);
    }

    std::optional<Eigen::MatrixXd> global_inverse;
    double global_scale = 0;
    if (any_fallback) {
        global_inverse = invert_covariance(covariance_matrix(train.features));
        if (!global_inverse) {
            throw RelationUndefinedError(
                "csmbr: a class needs the global covariance fallback, but the global covariance "
                "matrix is singular");
        }
        global_scale = max_pairwise(train.features,
                                    [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                                        return mahalanobis_distance(a, b, *global_inverse);
                                    });
        if (global_scale <= 0) {
            throw RelationUndefinedError("csmbr: all training samples coincide");
        }
    }

    CsmbrRelation rel;
    rel.dimension_ = n_features;
    for (auto& plan : plans) {
        if (plan.inverse && plan.scale > 0) {
            rel.inverse_covariances_.push_back(std::move(*plan.inverse));
            rel.scales_.push_back(plan.scale);
            rel.fallback_.push_back(false);
        } else {
            rel.inverse_covariances_.push_back(*global_inverse);
            rel.scales_.push_back(global_scale);
            rel.fallback_.push_back(true);
        }
    }
    return rel;
}

} // namespace frnn
