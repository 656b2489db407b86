#ifndef FRNN_STATS_HPP
#define FRNN_STATS_HPP

#include <optional>
#include <string>
#include <vector>

namespace frnn {

/// Balanced accuracies per dataset (rows) and method (columns). A missing
/// cell records that the method produced no result on that dataset (an
/// undefined relation or an exhausted time budget).
struct ResultMatrix {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    std::vector<std::vector<std::optional<double>>> cells; // [row][column]

    int n_rows() const { return static_cast<int>(datasets.size()); }
    int n_methods() const { return static_cast<int>(methods.size()); }
};

/// CSV form: header `dataset,<method>,...`; missing cells serialize as `x`.
/// The parser also accepts empty cells and `--` as missing. Throws
/// ParseError on malformed input.
ResultMatrix parse_result_matrix_csv(const std::string& text);
std::string serialize_result_matrix_csv(const ResultMatrix& matrix);

/// Mean per-class recall, classes taken from y_true. Throws on length
/// mismatch or empty input.
double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

enum class Alternative { TwoSided, Greater };

struct WilcoxonResult {
    double statistic = 0;   // W+: rank sum of positive differences a - b
    double p_value = 1;
    int n_used = 0;         // pairs remaining after zero differences are dropped
    bool exact = false;     // exact null distribution (n_used <= 25) vs normal approximation
    bool degenerate = false; // all differences were zero
};

/// Wilcoxon signed-rank test on paired scores. Zero differences are dropped;
/// tied absolute differences receive average ranks. Exact enumeration for
/// n_used <= 25, otherwise a normal approximation with tie and continuity
/// corrections. Alternative::Greater tests a > b. All-zero input returns the
/// degenerate p = 1; 1 <= n_used < 5 throws std::invalid_argument.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                    Alternative alternative);

/// How rows with missing cells enter the Friedman/Conover ranking.
/// CompleteCase drops them; WorstRank ranks a missing cell below every
/// present value (ties among missing cells share the averaged worst ranks).
enum class MissingPolicy { CompleteCase, WorstRank };

struct FriedmanResult {
    double statistic = 0;           // tie-corrected chi-square
    double p_value = 1;
    std::vector<double> mean_ranks; // per method; rank 1 = highest accuracy
    int n_rows_used = 0;
};

/// Friedman test over per-row method rankings (rank 1 = best, average ranks
/// on ties). Throws std::invalid_argument with fewer than 2 usable rows or
/// fewer than 2 methods.
FriedmanResult friedman(const ResultMatrix& matrix,
                        MissingPolicy policy = MissingPolicy::CompleteCase);

struct ConoverResult {
    std::vector<std::string> methods;
    // Symmetric matrices indexed [i][j]; diagonal entries are NaN.
    std::vector<std::vector<double>> raw_p;
    std::vector<std::vector<double>> adjusted_p; // Holm step-down over the m(m-1)/2 pairs
};

/// Conover-Iman pairwise post-hoc comparisons from the Friedman rank sums
/// (t statistics with (N-1)(m-1) degrees of freedom), Holm-adjusted.
ConoverResult conover_holm(const ResultMatrix& matrix,
                           MissingPolicy policy = MissingPolicy::CompleteCase);

/// Holm step-down adjustment: for raw p-values sorted ascending,
/// adjusted(i) = max over j <= i of min(1, (M - j + 1) * p(j)), returned in
/// the original order.
std::vector<double> holm_adjust(const std::vector<double>& raw);

struct DeficitSummary {
    std::vector<std::string> methods;
    std::vector<double> max_deficit; // max over rows of (row best - method value)
    std::vector<double> avg_deficit; // mean over rows where the method is present
};

/// Distance to the per-row best among present methods, summarised per
/// method over the rows where it is present.
DeficitSummary deficit_summary(const ResultMatrix& matrix);

/// The two-stage comparison: Friedman, then Conover-Holm only when the
/// Friedman p-value is below 0.05, plus the deficit summary.
struct ComparisonReport {
    FriedmanResult friedman;
    std::optional<ConoverResult> posthoc;
    DeficitSummary deficits;
    MissingPolicy policy = MissingPolicy::CompleteCase;
};

ComparisonReport compare_methods(const ResultMatrix& matrix,
                                 MissingPolicy policy = MissingPolicy::CompleteCase);

/// Aligned plain-text rendering of the full report.
std::string comparison_report_text(const ComparisonReport& report);

} // namespace frnn

#endif
