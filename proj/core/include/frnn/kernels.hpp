#ifndef FRNN_KERNELS_HPP
#define FRNN_KERNELS_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "frnn/relations.hpp"

namespace frnn {

enum class KernelFamily { Gaussian, Exponential, RationalQuadratic, Circular, Spherical };

/// Config-string names: gauss, exp, rat, circle, sphere.
std::optional<KernelFamily> kernel_family_from_string(std::string_view name);
std::string_view to_string(KernelFamily family);

struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double gamma = 1.0; // strictly positive
};

/// Kernel value as a function of the Euclidean distance r = |x - y|:
///   Gaussian            exp(-r^2 / gamma)
///   Exponential         exp(-r / gamma)
///   RationalQuadratic   gamma / (r^2 + gamma)
///   Circular            (2/pi)(arccos(r/gamma) - (r/gamma) sqrt(1 - (r/gamma)^2)), 0 for r >= gamma
///   Spherical           1 - (3/2)(r/gamma) + (1/2)(r/gamma)^3, 0 for r >= gamma
/// All values lie in [0,1] and equal 1 at r = 0.
double kernel_of_distance(const KernelSpec& spec, double r);

/// Analytic d/dgamma of kernel_of_distance at fixed r. Circular and
/// spherical kernels return 0 on and outside the support boundary r >= gamma
/// (the one-sided limit from outside).
double kernel_gamma_derivative_of_distance(const KernelSpec& spec, double r);

/// kernel_of_distance at r = |x - y|. Throws on dimension mismatch or
/// gamma <= 0.
double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double kernel_gamma_derivative(const KernelSpec& spec, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y);

/// A kernel used directly as a symmetric indiscernibility relation.
class KernelRelation final : public IndiscernibilityRelation {
public:
    KernelRelation(KernelSpec spec, Eigen::Index dimension);

    double evaluate(int first_class, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) const override;
    Eigen::Index dimension() const override { return dimension_; }
    std::string name() const override;

    const KernelSpec& spec() const { return spec_; }

private:
    KernelSpec spec_;
    Eigen::Index dimension_;
};

/// Builds any named relation on training data: the Table-style distance
/// kinds (man, euc, che, can, cos, pcc, mah, csmbr) or a kernel family
/// (gauss, exp, rat, circle, sphere) with gamma 1, overridable with a
/// "name:gamma" suffix such as "gauss:0.5". Throws std::invalid_argument for
/// unknown names and RelationUndefinedError for singular covariances.
std::unique_ptr<IndiscernibilityRelation> build_named_relation(const std::string& name,
                                                               const DecisionSystem& train);

/// True when build_named_relation would recognise the name.
bool is_known_relation_name(const std::string& name);

/// Throws the same std::invalid_argument as build_named_relation for an
/// unknown name or a malformed :gamma suffix, without building anything.
void validate_relation_name(const std::string& name);

/// All bare relation names, distance kinds first, for error messages.
std::vector<std::string> known_relation_names();

} // namespace frnn

#endif
