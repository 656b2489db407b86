#ifndef FRNN_EXPERIMENT_HPP
#define FRNN_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frnn/dataset.hpp"
#include "frnn/stats.hpp"
#include "frnn/tuning.hpp"

namespace frnn {

struct ExperimentConfig {
    std::vector<std::string> dataset_paths;
    std::vector<std::string> relation_names;
    int k = 3;
    int n_folds = 10;
    std::uint64_t seed = 0;
    bool normalize = true;
    std::string out_dir;
    double time_budget_seconds = 0; // per dataset x relation; 0 = unlimited
    std::string csv_target;        // decision column for CSV files; empty = last column
    GradientDescentConfig gd;
    ComboConfig combo;
};

/// One fold of one relation on one dataset. The duration is stream-side
/// diagnostics only; output files never contain timings, keeping them
/// byte-identical across runs.
struct RunRecord {
    std::string dataset;
    std::string relation;
    int fold = 0;
    std::optional<double> balanced_accuracy;
    std::string reason; // "relation-undefined" | "timeout" when accuracy is absent
    double duration_seconds = 0;
};

struct EvaluateOutcome {
    std::vector<RunRecord> records; // canonical (dataset, relation, fold) order
    ResultMatrix matrix;            // per-dataset fold means; missing if any fold failed

    /// True when every (dataset, relation) cell is missing.
    bool all_failed() const;
};

/// The cross-validation pipeline: per dataset x relation x fold, fit the
/// range normalizer on the training part, build the relation on normalized
/// training data, fit FRNN, predict the normalized test fold and score
/// balanced accuracy. Folds are shared across relations of a dataset.
/// Relation failures become missing records with a reason; anything else
/// (unreadable data, unknown relation name, unmet classifier preconditions)
/// throws. Progress lines stream to *progress when given.
EvaluateOutcome run_evaluate(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

/// Writes results.csv (the ResultMatrix) and runs.csv (per-fold records)
/// into out_dir, creating it if needed.
void write_evaluate_outputs(const EvaluateOutcome& outcome, const std::string& out_dir);

/// Writes <stem>_friedman.csv, <stem>_ranks.csv, <stem>_conover_holm.csv
/// (when the post-hoc stage ran), <stem>_deficits.csv and <stem>_report.txt.
void write_comparison_outputs(const ComparisonReport& report, const std::string& out_dir,
                              const std::string& stem);

/// Writes gamma_trace.csv (iteration,gamma,loss) and gamma_summary.txt.
void write_gamma_outputs(const GammaFitResult& result, const std::string& out_dir);

/// Writes combo_scores.csv (candidate,fold,score plus the mean) and
/// combo_summary.txt.
void write_combo_outputs(const ComboResult& result, const ComboConfig& cfg,
                         const std::string& out_dir);

/// CSV rendering of a fold plan: sample,class,fold.
std::string serialize_fold_plan(const DecisionSystem& ds, const FoldPlan& plan);

/// Reads a dataset file, dispatching on extension as load_dataset does, and
/// reports the path in any error message.
DecisionSystem load_dataset_checked(const std::string& path, const std::string& csv_target);

} // namespace frnn

#endif
