#include "frnn/kernels.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "frnn/errors.hpp"

namespace frnn {
namespace {

void check_spec(const KernelSpec& spec) {
    if (!(spec.gamma > 0)) throw std::invalid_argument("kernel gamma must be strictly positive");
}

struct ParsedRelationName {
    std::string base;
    std::optional<double> gamma;
};

/// Splits "name" or "name:gamma"; throws for a malformed or non-positive gamma.
ParsedRelationName parse_relation_name(const std::string& name) {
    ParsedRelationName parsed{name, std::nullopt};
    if (auto colon = name.find(':'); colon != std::string::npos) {
        parsed.base = name.substr(0, colon);
        const std::string suffix = name.substr(colon + 1);
        double value = 0;
        const char* end = suffix.data() + suffix.size();
        auto [ptr, ec] = std::from_chars(suffix.data(), end, value);
        if (ec != std::errc() || ptr != end || !(value > 0)) {
            throw std::invalid_argument("invalid gamma in relation name '" + name + "'");
        }
        parsed.gamma = value;
    }
    return parsed;
}

std::string unknown_name_message(const std::string& name) {
    std::string known;
    for (const auto& n : known_relation_names()) {
        if (!known.empty()) known += ", ";
        known += n;
    }
    return "unknown relation name '" + name + "' (valid names: " + known +
           "; kernels accept an optional :gamma suffix)";
}

} // namespace

std::optional<KernelFamily> kernel_family_from_string(std::string_view name) {
    if (name == "gauss") return KernelFamily::Gaussian;
    if (name == "exp") return KernelFamily::Exponential;
    if (name == "rat") return KernelFamily::RationalQuadratic;
    if (name == "circle") return KernelFamily::Circular;
    if (name == "sphere") return KernelFamily::Spherical;
    return std::nullopt;
}

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Gaussian: return "gauss";
        case KernelFamily::Exponential: return "exp";
        case KernelFamily::RationalQuadratic: return "rat";
        case KernelFamily::Circular: return "circle";
        case KernelFamily::Spherical: return "sphere";
    }
    return "?";
}

double kernel_of_distance(const KernelSpec& spec, double r) {
    check_spec(spec);
    const double g = spec.gamma;
    switch (spec.family) {
        case KernelFamily::Gaussian: return std::exp(-r * r / g);
        case KernelFamily::Exponential: return std::exp(-r / g);
        case KernelFamily::RationalQuadratic: return g / (r * r + g);
        case KernelFamily::Circular: {
            if (r >= g) return 0;
            const double t = r / g;
            return (2.0 / std::numbers::pi) * (std::acos(t) - t * std::sqrt(1.0 - t * t));
        }
        case KernelFamily::Spherical: {
            if (r >= g) return 0;
            const double t = r / g;
            return 1.0 - 1.5 * t + 0.5 * t * t * t;
        }
    }
    throw std::logic_error("unreachable kernel family");
}

double kernel_gamma_derivative_of_distance(const KernelSpec& spec, double r) {
    check_spec(spec);
    const double g = spec.gamma;
    switch (spec.family) {
        case KernelFamily::Gaussian: return (r * r) / (g * g) * std::exp(-r * r / g);
        case KernelFamily::Exponential: return r / (g * g) * std::exp(-r / g);
        case KernelFamily::RationalQuadratic: {
            const double denom = r * r + g;
            return (r * r) / (denom * denom);
        }
        case KernelFamily::Circular: {
            // 0 on and outside the support boundary (the outside branch).
            if (r >= g) return 0;
            const double t = r / g;
            return (4.0 / std::numbers::pi) * (r / (g * g)) * std::sqrt(1.0 - t * t);
        }
        case KernelFamily::Spherical: {
            if (r >= g) return 0;
            return 1.5 * r * (g * g - r * r) / (g * g * g * g);
        }
    }
    throw std::logic_error("unreachable kernel family");
}

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
    return kernel_of_distance(spec, (x - y).norm());
}

double kernel_gamma_derivative(const KernelSpec& spec, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
    return kernel_gamma_derivative_of_distance(spec, (x - y).norm());
}

KernelRelation::KernelRelation(KernelSpec spec, Eigen::Index dimension)
    : spec_(spec), dimension_(dimension) {
    check_spec(spec_);
    if (dimension < 1) throw std::invalid_argument("relation dimension must be >= 1");
}

double KernelRelation::evaluate(int, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    if (x.size() != dimension_ || y.size() != dimension_) {
        throw std::invalid_argument("relation evaluated on vectors of the wrong dimension");
    }
    return kernel_of_distance(spec_, (x - y).norm());
}

std::string KernelRelation::name() const { return std::string(to_string(spec_.family)); }

std::unique_ptr<IndiscernibilityRelation> build_named_relation(const std::string& name,
                                                               const DecisionSystem& train) {
    const ParsedRelationName parsed = parse_relation_name(name);
    if (auto kind = distance_kind_from_string(parsed.base)) {
        if (parsed.gamma) {
            throw std::invalid_argument("relation '" + parsed.base +
                                        "' does not take a gamma parameter");
        }
        return build_relation(*kind, train);
    }
    if (auto family = kernel_family_from_string(parsed.base)) {
        KernelSpec spec{*family, parsed.gamma.value_or(1.0)};
        return std::make_unique<KernelRelation>(spec, train.n_features());
    }
    throw std::invalid_argument(unknown_name_message(name));
}

void validate_relation_name(const std::string& name) {
    const ParsedRelationName parsed = parse_relation_name(name);
    if (auto kind = distance_kind_from_string(parsed.base)) {
        if (parsed.gamma) {
            throw std::invalid_argument("relation '" + parsed.base +
                                        "' does not take a gamma parameter");
        }
        return;
    }
    if (kernel_family_from_string(parsed.base)) return;
    throw std::invalid_argument(unknown_name_message(name));
}

bool is_known_relation_name(const std::string& name) {
    try {
        validate_relation_name(name);
        return true;
    } catch (...) {
        return false;
    }
}

std::vector<std::string> known_relation_names() {
    return {"man", "euc", "che", "can", "cos", "pcc", "mah", "csmbr",
            "gauss", "exp", "rat", "circle", "sphere"};
}

} // namespace frnn
