#ifndef FRNN_DATASET_HPP
#define FRNN_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace frnn {

/// A tabular classification problem: numeric conditional attributes plus a
/// categorical decision attribute mapped to dense class indices. Class index
/// order follows first appearance in the source file.
struct DecisionSystem {
    Eigen::MatrixXd features;              // n_samples x n_features, all finite
    std::vector<int> classes;              // length n_samples, values < class_names.size()
    std::vector<std::string> class_names;  // original decision labels, order of first appearance
    std::vector<std::string> feature_names;

    Eigen::Index n_samples() const { return features.rows(); }
    Eigen::Index n_features() const { return features.cols(); }
    int n_classes() const { return static_cast<int>(class_names.size()); }
};

/// Per-feature affine map fitted on training data: x -> (x - minimum) / range.
/// range[j] == 0 marks a constant feature, which maps to 0.
struct RangeNormalizer {
    Eigen::VectorXd minimum;
    Eigen::VectorXd range;
};

/// Stratified cross-validation assignment: fold index per sample.
struct FoldPlan {
    std::vector<int> assignment;  // length n_samples, values in [0, n_folds)
    int n_folds = 0;
    std::uint64_t seed = 0;

    /// Row indices of each fold, ascending within a fold.
    std::vector<std::vector<Eigen::Index>> fold_indices() const;
    /// Complement of fold f, ascending.
    std::vector<Eigen::Index> train_indices(int fold) const;
    /// Members of fold f, ascending.
    std::vector<Eigen::Index> test_indices(int fold) const;
};

/// Parses KEEL-style .dat text: @relation / @attribute headers, then @data
/// rows. The last declared attribute is the decision attribute; nominal
/// conditional attributes are dropped. Throws ParseError on malformed input.
DecisionSystem parse_keel(const std::string& text);

/// Parses RFC-4180 CSV with a header line. The named target column becomes
/// the decision attribute; remaining columns are kept as features when every
/// value in the column parses as a finite number, and dropped otherwise.
DecisionSystem parse_csv(const std::string& text, const std::string& target_column);

/// Serializes features plus the decision column (named target_name) as CSV.
/// Feature values are written in shortest round-trip form, so
/// parse_csv(serialize_csv(ds), target_name) reproduces ds exactly.
std::string serialize_csv(const DecisionSystem& ds, const std::string& target_name = "class");

/// Loads a dataset file, dispatching on extension: ".dat" -> parse_keel,
/// anything else -> parse_csv. Empty target_column means the last CSV header
/// column. Throws ParseError (also for unreadable paths).
DecisionSystem load_dataset(const std::string& path, const std::string& target_column = "");

/// Per-feature min and (max - min) over the training rows.
RangeNormalizer fit_range_normalizer(const DecisionSystem& train);

/// Applies a fitted normalizer. Training rows land in [0,1]; unseen rows may
/// fall outside, which is handled downstream by relation-level clamping.
Eigen::MatrixXd apply_normalizer(const RangeNormalizer& norm, const Eigen::MatrixXd& data);

/// Deterministic stratified folds: per class, indices are shuffled with the
/// seeded generator and dealt round-robin, each class continuing from the
/// fold after the one the previous class ended on. Per-class and overall
/// fold sizes each differ by at most one.
FoldPlan make_folds(const DecisionSystem& ds, int n_folds, std::uint64_t seed);

/// Row subset preserving class_names and feature_names.
DecisionSystem subset(const DecisionSystem& ds, const std::vector<Eigen::Index>& rows);

} // namespace frnn

#endif
