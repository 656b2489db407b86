#include "frnn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "detail_csv.hpp"
#include "detail_format.hpp"
#include "frnn/errors.hpp"

namespace frnn {
namespace {

constexpr double kMissingRank = -std::numeric_limits<double>::infinity();

/// Average ranks with rank 1 for the LARGEST value; equal values share the
/// mean of the ranks they span.
std::vector<double> descending_average_ranks(const std::vector<double>& values) {
    const std::size_t m = values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(m);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

/// Per-row rank matrix under the missing-data policy. CompleteCase keeps
/// only fully present rows; WorstRank keeps rows with at least one value and
/// ranks missing cells as -infinity (jointly worst).
std::vector<std::vector<double>> rank_rows(const ResultMatrix& matrix, MissingPolicy policy) {
    if (matrix.n_methods() < 2) throw std::invalid_argument("need at least 2 methods");
    std::vector<std::vector<double>> ranked;
    for (const auto& row : matrix.cells) {
        std::size_t present = 0;
        for (const auto& cell : row) present += cell.has_value();
        if (policy == MissingPolicy::CompleteCase) {
            if (present != row.size()) continue;
        } else {
            if (present == 0) continue;
        }
        std::vector<double> values;
        values.reserve(row.size());
        for (const auto& cell : row) values.push_back(cell.value_or(kMissingRank));
        ranked.push_back(descending_average_ranks(values));
    }
    return ranked;
}

double tie_term_of_row(const std::vector<double>& ranks) {
    // Sum of t^3 - t over groups of tied ranks.
    std::vector<double> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    double term = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        term += t * t * t - t;
        i = j + 1;
    }
    return term;
}

} // namespace

ResultMatrix parse_result_matrix_csv(const std::string& text) {
    auto records = detail::parse_csv_records(text);
    if (records.empty()) throw ParseError("result matrix is empty");
    const auto& header = records[0];
    if (header.size() < 3) {
        throw ParseError("result matrix needs a dataset column and at least 2 method columns");
    }
    if (header[0] != "dataset") {
        throw ParseError("result matrix header must start with 'dataset'");
    }
    if (records.size() < 2) throw ParseError("result matrix has no rows");

    ResultMatrix matrix;
    matrix.methods.assign(header.begin() + 1, header.end());
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& record = records[i];
        if (record.size() != header.size()) {
            throw ParseError("result matrix row " + std::to_string(i + 1) +
                             " does not match the header width");
        }
        matrix.datasets.push_back(record[0]);
        std::vector<std::optional<double>> row;
        for (std::size_t j = 1; j < record.size(); ++j) {
            const std::string& cell = record[j];
            if (cell.empty() || cell == "x" || cell == "--") {
                row.emplace_back(std::nullopt);
                continue;
            }
            try {
                std::size_t used = 0;
                const double value = std::stod(cell, &used);
                if (used != cell.size() || !std::isfinite(value) || value < 0 || value > 1) {
                    throw std::invalid_argument(cell);
                }
                row.emplace_back(value);
            } catch (const std::exception&) {
                throw ParseError("result matrix row " + std::to_string(i + 1) + ": bad cell '" +
                                 cell + "'");
            }
        }
        matrix.cells.push_back(std::move(row));
    }
    return matrix;
}

std::string serialize_result_matrix_csv(const ResultMatrix& matrix) {
    std::string out = "dataset";
    for (const auto& method : matrix.methods) {
        out.push_back(',');
        detail::append_csv_field(out, method);
    }
    out.push_back('\n');
    for (int i = 0; i < matrix.n_rows(); ++i) {
        detail::append_csv_field(out, matrix.datasets[static_cast<std::size_t>(i)]);
        for (const auto& cell : matrix.cells[static_cast<std::size_t>(i)]) {
            out.push_back(',');
            out.append(cell ? detail::format_double(*cell) : "x");
        }
        out.push_back('\n');
    }
    return out;
}

double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("balanced_accuracy: length mismatch");
    }
    if (y_true.empty()) throw std::invalid_argument("balanced_accuracy: empty input");

    const int max_class = *std::max_element(y_true.begin(), y_true.end());
    std::vector<std::size_t> count(static_cast<std::size_t>(max_class) + 1, 0);
    std::vector<std::size_t> correct(static_cast<std::size_t>(max_class) + 1, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0) throw std::invalid_argument("balanced_accuracy: negative class");
        const auto c = static_cast<std::size_t>(y_true[i]);
        ++count[c];
        correct[c] += y_pred[i] == y_true[i];
    }
    double sum = 0;
    int n_classes = 0;
    for (std::size_t c = 0; c < count.size(); ++c) {
        if (count[c] == 0) continue;
        sum += static_cast<double>(correct[c]) / static_cast<double>(count[c]);
        ++n_classes;
    }
    return sum / n_classes;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                    Alternative alternative) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: length mismatch");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0) diffs.push_back(d);
    }

    WilcoxonResult result;
    result.n_used = static_cast<int>(diffs.size());
    if (diffs.empty()) {
        result.degenerate = true;
        result.p_value = 1.0;
        return result;
    }
    if (diffs.size() < 5) {
        throw std::invalid_argument(
            "wilcoxon: fewer than 5 nonzero differences; the test is uninformative");
    }

    // Average ranks of |d|.
    const std::size_t n = diffs.size();
    std::vector<double> abs_diffs(n);
    for (std::size_t i = 0; i < n; ++i) abs_diffs[i] = -std::abs(diffs[i]);
    const std::vector<double> ranks = descending_average_ranks(abs_diffs); // rank 1 = smallest |d|

    double w_plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0) w_plus += ranks[i];
    }
    result.statistic = w_plus;

    double p_ge = 0;
    double p_le = 0;
    if (n <= 25) {
        result.exact = true;
        // Exact permutation distribution of W+ over all sign assignments,
        // tabulated over doubled ranks so average ranks become integers.
        std::vector<long long> doubled(n);
        long long total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = std::llround(2 * ranks[i]);
            total += doubled[i];
        }
        std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
        count[0] = 1.0;
        for (long long r : doubled) {
            for (long long s = total; s >= r; --s) {
                count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];
            }
        }
        const double norm = std::ldexp(1.0, -static_cast<int>(n)); // 2^-n
        const auto w2 = static_cast<long long>(std::llround(2 * w_plus));
        for (long long s = 0; s <= total; ++s) {
            const double mass = count[static_cast<std::size_t>(s)] * norm;
            if (s >= w2) p_ge += mass;
            if (s <= w2) p_le += mass;
        }
    } else {
        // Normal approximation with tie and continuity corrections.
        const double dn = static_cast<double>(n);
        const double mu = dn * (dn + 1) / 4.0;
        const double tie_term = tie_term_of_row(ranks);
        const double sigma2 = dn * (dn + 1) * (2 * dn + 1) / 24.0 - tie_term / 48.0;
        const double sigma = std::sqrt(sigma2);
        const boost::math::normal_distribution<double> normal;
        p_ge = boost::math::cdf(boost::math::complement(normal, (w_plus - mu - 0.5) / sigma));
        p_le = boost::math::cdf(normal, (w_plus - mu + 0.5) / sigma);
    }

    result.p_value = alternative == Alternative::Greater
                         ? p_ge
                         : std::min(1.0, 2.0 * std::min(p_ge, p_le));
    return result;
}

FriedmanResult friedman(const ResultMatrix& matrix, MissingPolicy policy) {
    const auto ranked = rank_rows(matrix, policy);
    const auto n = static_cast<double>(ranked.size());
    const auto m = static_cast<double>(matrix.n_methods());
    if (ranked.size() < 2) {
        throw std::invalid_argument("friedman: fewer than 2 usable rows under the missing-data policy");
    }

    FriedmanResult result;
    result.n_rows_used = static_cast<int>(ranked.size());
    std::vector<double> rank_sums(matrix.cells.front().size(), 0.0);
    double tie_sum = 0;
    for (const auto& row : ranked) {
        for (std::size_t j = 0; j < row.size(); ++j) rank_sums[j] += row[j];
        tie_sum += tie_term_of_row(row);
    }
    result.mean_ranks.resize(rank_sums.size());
    for (std::size_t j = 0; j < rank_sums.size(); ++j) result.mean_ranks[j] = rank_sums[j] / n;

    const double correction = 1.0 - tie_sum / (n * (m * m * m - m));
    if (correction <= 0) {
        // Every row is a complete tie; no evidence of any difference.
        result.statistic = 0;
        result.p_value = 1.0;
        return result;
    }
    double ssbn = 0;
    for (double rj : rank_sums) ssbn += rj * rj;
    const double uncorrected = 12.0 / (m * n * (m + 1)) * ssbn - 3.0 * n * (m + 1);
    result.statistic = uncorrected / correction;

    const boost::math::chi_squared_distribution<double> chi2(m - 1);
    result.p_value =
        boost::math::cdf(boost::math::complement(chi2, std::max(result.statistic, 0.0)));
    return result;
}

std::vector<double> holm_adjust(const std::vector<double>& raw) {
    const std::size_t m = raw.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
    std::vector<double> adjusted(m);
    double running = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double scaled = std::min(1.0, static_cast<double>(m - i) * raw[order[i]]);
        running = std::max(running, scaled);
        adjusted[order[i]] = running;
    }
    return adjusted;
}

ConoverResult conover_holm(const ResultMatrix& matrix, MissingPolicy policy) {
    const auto ranked = rank_rows(matrix, policy);
    if (ranked.size() < 2) {
        throw std::invalid_argument("conover: fewer than 2 usable rows under the missing-data policy");
    }
    const auto n = static_cast<double>(ranked.size());
    const auto m_count = matrix.cells.front().size();
    const auto m = static_cast<double>(m_count);

    std::vector<double> rank_sums(m_count, 0.0);
    double a1 = 0; // sum of squared ranks over every cell
    for (const auto& row : ranked) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            rank_sums[j] += row[j];
            a1 += row[j] * row[j];
        }
    }
    const double c1 = n * m * (m + 1) * (m + 1) / 4.0;
    const double df = (n - 1) * (m - 1);

    ConoverResult result;
    result.methods = matrix.methods;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.raw_p.assign(m_count, std::vector<double>(m_count, nan));
    result.adjusted_p.assign(m_count, std::vector<double>(m_count, nan));

    // Conover's post-Friedman t statistics. With every row fully tied
    // (a1 == c1) there is no rank variance and no pair can differ.
    double denom2 = 0;
    if (a1 - c1 > 0) {
        double squares = 0;
        for (double rj : rank_sums) {
            const double centered = rj - n * (m + 1) / 2.0;
            squares += centered * centered;
        }
        const double t1 = (m - 1) * squares / (a1 - c1);
        denom2 = 2.0 * n * (a1 - c1) / df * (1.0 - t1 / (n * (m - 1)));
    }

    const boost::math::students_t_distribution<double> student(df);
    std::vector<double> raw_flat;
    for (std::size_t i = 0; i < m_count; ++i) {
        for (std::size_t j = i + 1; j < m_count; ++j) {
            double p = 1.0;
            if (a1 - c1 <= 0) {
                p = 1.0;
            } else if (denom2 <= 0) {
                // Rank sums explain all variance; distinct sums separate perfectly.
                p = rank_sums[i] == rank_sums[j] ? 1.0 : 0.0;
            } else {
                const double t = std::abs(rank_sums[i] - rank_sums[j]) / std::sqrt(denom2);
                p = 2.0 * boost::math::cdf(boost::math::complement(student, t));
                p = std::min(1.0, p);
            }
            result.raw_p[i][j] = result.raw_p[j][i] = p;
            raw_flat.push_back(p);
        }
    }
    const std::vector<double> adjusted_flat = holm_adjust(raw_flat);
    std::size_t index = 0;
    for (std::size_t i = 0; i < m_count; ++i) {
        for (std::size_t j = i + 1; j < m_count; ++j) {
            result.adjusted_p[i][j] = result.adjusted_p[j][i] = adjusted_flat[index++];
        }
    }
    return result;
}

DeficitSummary deficit_summary(const ResultMatrix& matrix) {
    if (matrix.n_rows() < 1) throw std::invalid_argument("deficit_summary: empty matrix");
    const auto m = static_cast<std::size_t>(matrix.n_methods());

    DeficitSummary summary;
    summary.methods = matrix.methods;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    summary.max_deficit.assign(m, nan);
    summary.avg_deficit.assign(m, nan);

    std::vector<double> sum(m, 0.0);
    std::vector<double> best_seen(m, 0.0);
    std::vector<int> rows(m, 0);
    for (const auto& row : matrix.cells) {
        double best = -1;
        for (const auto& cell : row) {
            if (cell && *cell > best) best = *cell;
        }
        if (best < 0) continue; // fully missing row
        for (std::size_t j = 0; j < m; ++j) {
            if (!row[j]) continue;
            const double deficit = best - *row[j];
            sum[j] += deficit;
            best_seen[j] = std::max(best_seen[j], deficit);
            ++rows[j];
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (rows[j] == 0) continue;
        summary.max_deficit[j] = best_seen[j];
        summary.avg_deficit[j] = sum[j] / rows[j];
    }
    return summary;
}

ComparisonReport compare_methods(const ResultMatrix& matrix, MissingPolicy policy) {
    ComparisonReport report;
    report.policy = policy;
    report.friedman = friedman(matrix, policy);
    if (report.friedman.p_value < 0.05) report.posthoc = conover_holm(matrix, policy);
    report.deficits = deficit_summary(matrix);
    return report;
}

namespace {

std::string fixed6(double v) {
    if (std::isnan(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void pad_to(std::string& line, std::size_t width) {
    while (line.size() < width) line.push_back(' ');
}

} // namespace

std::string comparison_report_text(const ComparisonReport& report) {
    std::ostringstream out;
    const auto& methods = report.deficits.methods;
    std::size_t name_width = 6;
    for (const auto& method : methods) name_width = std::max(name_width, method.size());

    out << "Friedman test ("
        << (report.policy == MissingPolicy::CompleteCase ? "complete-case rows"
                                                         : "worst-rank imputation, rows")
        << ": " << report.friedman.n_rows_used << ")\n";
    out << "  statistic: " << fixed6(report.friedman.statistic) << "\n";
    out << "  p-value:   " << fixed6(report.friedman.p_value) << "\n\n";

    out << "Mean ranks (rank 1 = best)\n";
    for (std::size_t j = 0; j < methods.size(); ++j) {
        std::string line = "  " + methods[j];
        pad_to(line, name_width + 4);
        out << line << fixed6(report.friedman.mean_ranks[j]) << "\n";
    }
    out << "\n";

    if (report.posthoc) {
        out << "Conover-Holm adjusted p-values\n";
        const std::size_t cell = 11;
        std::string header(name_width + 4, ' ');
        for (const auto& method : methods) {
            std::string field = method;
            pad_to(field, cell);
            header += field;
        }
        out << "  " << header << "\n";
        for (std::size_t i = 0; i < methods.size(); ++i) {
            std::string line = "  " + methods[i];
            pad_to(line, name_width + 6);
            for (std::size_t j = 0; j < methods.size(); ++j) {
                std::string field = i == j ? "-" : fixed6(report.posthoc->adjusted_p[i][j]);
                pad_to(field, cell);
                line += field;
            }
            out << line << "\n";
        }
    } else {
        out << "Post-hoc stage skipped (Friedman p >= 0.05)\n";
    }
    out << "\n";

    out << "Deficit to the per-row best (max / avg)\n";
    for (std::size_t j = 0; j < methods.size(); ++j) {
        std::string line = "  " + methods[j];
        pad_to(line, name_width + 4);
        out << line << fixed6(report.deficits.max_deficit[j]) << " / "
            << fixed6(report.deficits.avg_deficit[j]) << "\n";
    }
    return out.str();
}

} // namespace frnn
