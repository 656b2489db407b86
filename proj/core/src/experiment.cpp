#include "frnn/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "detail_csv.hpp"
#include "detail_format.hpp"
#include "frnn/classifier.hpp"
#include "frnn/errors.hpp"
#include "frnn/kernels.hpp"

namespace frnn {
namespace {

namespace fs = std::filesystem;

std::string dataset_id(const std::string& path) { return fs::path(path).stem().string(); }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << content;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void stream_record(std::ostream* progress, const RunRecord& record) {
    if (!progress) return;
    *progress << record.dataset << " " << record.relation << " fold " << record.fold << ": ";
    if (record.balanced_accuracy) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", *record.balanced_accuracy);
        *progress << buf;
    } else {
        *progress << "x (" << record.reason << ")";
    }
    char t[32];
    std::snprintf(t, sizeof(t), "%.3fs", record.duration_seconds);
    *progress << "  [" << t << "]\n";
}

} // namespace

bool EvaluateOutcome::all_failed() const {
    for (const auto& row : matrix.cells) {
        for (const auto& cell : row) {
            if (cell) return false;
        }
    }
    return true;
}

DecisionSystem load_dataset_checked(const std::string& path, const std::string& csv_target) {
    try {
        return load_dataset(path, csv_target);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

EvaluateOutcome run_evaluate(const ExperimentConfig& cfg, std::ostream* progress) {
    if (cfg.dataset_paths.empty()) throw std::invalid_argument("evaluate: no datasets given");
    if (cfg.relation_names.empty()) throw std::invalid_argument("evaluate: no relations given");
    if (cfg.k < 1) throw std::invalid_argument("evaluate: k must be >= 1");
    if (cfg.n_folds < 2) throw std::invalid_argument("evaluate: folds must be >= 2");
    for (const auto& name : cfg.relation_names) validate_relation_name(name);

    EvaluateOutcome outcome;
    outcome.matrix.methods = cfg.relation_names;

    struct FoldData {
        DecisionSystem train;        // normalized when cfg.normalize
        Eigen::MatrixXd test;        // same transformation
        std::vector<int> y_true;
    };

    for (const auto& path : cfg.dataset_paths) {
        const DecisionSystem ds = load_dataset_checked(path, cfg.csv_target);
        const std::string id = dataset_id(path);
        const FoldPlan plan = make_folds(ds, cfg.n_folds, cfg.seed);

        std::vector<FoldData> folds;
        folds.reserve(static_cast<std::size_t>(cfg.n_folds));
        for (int f = 0; f < cfg.n_folds; ++f) {
            FoldData fold;
            fold.train = subset(ds, plan.train_indices(f));
            const DecisionSystem test = subset(ds, plan.test_indices(f));
            if (cfg.normalize) {
                const RangeNormalizer norm = fit_range_normalizer(fold.train);
                fold.train.features = apply_normalizer(norm, fold.train.features);
                fold.test = apply_normalizer(norm, test.features);
            } else {
                fold.test = test.features;
            }
            fold.y_true = test.classes;
            folds.push_back(std::move(fold));
        }

        outcome.matrix.datasets.push_back(id);
        std::vector<std::optional<double>> matrix_row;
        for (const auto& relation_name : cfg.relation_names) {
            const auto budget_start = std::chrono::steady_clock::now();
            bool all_present = true;
            double sum = 0;
            for (int f = 0; f < cfg.n_folds; ++f) {
                RunRecord record;
                record.dataset = id;
                record.relation = relation_name;
                record.fold = f;
                if (cfg.time_budget_seconds > 0 &&
                    seconds_since(budget_start) > cfg.time_budget_seconds) {
                    record.reason = "timeout";
                    all_present = false;
                    stream_record(progress, record);
                    outcome.records.push_back(std::move(record));
                    continue;
                }
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    const FoldData& fold = folds[static_cast<std::size_t>(f)];
                    std::shared_ptr<const IndiscernibilityRelation> relation =
                        build_named_relation(relation_name, fold.train);
                    const FrnnModel model = fit(fold.train, std::move(relation), cfg.k);
                    std::vector<int> y_pred;
                    y_pred.reserve(static_cast<std::size_t>(fold.test.rows()));
                    for (Eigen::Index i = 0; i < fold.test.rows(); ++i) {
                        y_pred.push_back(model.predict(fold.test.row(i).transpose()));
                    }
                    record.balanced_accuracy = balanced_accuracy(fold.y_true, y_pred);
                    sum += *record.balanced_accuracy;
                } catch (const RelationUndefinedError&) {
                    record.reason = "relation-undefined";
                    all_present = false;
                }
                record.duration_seconds = seconds_since(t0);
                stream_record(progress, record);
                outcome.records.push_back(std::move(record));
            }
            if (all_present) {
                matrix_row.emplace_back(sum / cfg.n_folds);
            } else {
                matrix_row.emplace_back(std::nullopt);
            }
        }
        outcome.matrix.cells.push_back(std::move(matrix_row));
    }
    return outcome;
}

void write_evaluate_outputs(const EvaluateOutcome& outcome, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "results.csv", serialize_result_matrix_csv(outcome.matrix));

    std::string runs = "dataset,relation,fold,balanced_accuracy,reason\n";
    for (const auto& record : outcome.records) {
        detail::append_csv_field(runs, record.dataset);
        runs.push_back(',');
        detail::append_csv_field(runs, record.relation);
        runs.push_back(',');
        runs += std::to_string(record.fold);
        runs.push_back(',');
        if (record.balanced_accuracy) runs += detail::format_double(*record.balanced_accuracy);
        runs.push_back(',');
        runs += record.reason;
        runs.push_back('\n');
    }
    write_file(fs::path(out_dir) / "runs.csv", runs);
}

void write_comparison_outputs(const ComparisonReport& report, const std::string& out_dir,
                              const std::string& stem) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::string friedman_csv = "statistic,p_value,rows_used\n";
    friedman_csv += detail::format_double(report.friedman.statistic);
    friedman_csv.push_back(',');
    friedman_csv += detail::format_double(report.friedman.p_value);
    friedman_csv.push_back(',');
    friedman_csv += std::to_string(report.friedman.n_rows_used);
    friedman_csv.push_back('\n');
    write_file(dir / (stem + "_friedman.csv"), friedman_csv);

    std::string ranks_csv = "method,mean_rank\n";
    const auto& methods = report.deficits.methods;
    for (std::size_t j = 0; j < methods.size(); ++j) {
        detail::append_csv_field(ranks_csv, methods[j]);
        ranks_csv.push_back(',');
        ranks_csv += detail::format_double(report.friedman.mean_ranks[j]);
        ranks_csv.push_back('\n');
    }
    write_file(dir / (stem + "_ranks.csv"), ranks_csv);

    if (report.posthoc) {
        std::string conover_csv = "method";
        for (const auto& method : methods) {
            conover_csv.push_back(',');
            detail::append_csv_field(conover_csv, method);
        }
        conover_csv.push_back('\n');
        for (std::size_t i = 0; i < methods.size(); ++i) {
            detail::append_csv_field(conover_csv, methods[i]);
            for (std::size_t j = 0; j < methods.size(); ++j) {
                conover_csv.push_back(',');
                if (i != j) {
                    conover_csv += detail::format_double(report.posthoc->adjusted_p[i][j]);
                }
            }
            conover_csv.push_back('\n');
        }
        write_file(dir / (stem + "_conover_holm.csv"), conover_csv);
    }

    std::string deficits_csv = "method,max_deficit,avg_deficit\n";
    for (std::size_t j = 0; j < methods.size(); ++j) {
        detail::append_csv_field(deficits_csv, methods[j]);
        deficits_csv.push_back(',');
        const double mx = report.deficits.max_deficit[j];
        const double av = report.deficits.avg_deficit[j];
        deficits_csv += std::isnan(mx) ? "x" : detail::format_double(mx);
        deficits_csv.push_back(',');
        deficits_csv += std::isnan(av) ? "x" : detail::format_double(av);
        deficits_csv.push_back('\n');
    }
    write_file(dir / (stem + "_deficits.csv"), deficits_csv);

    write_file(dir / (stem + "_report.txt"), comparison_report_text(report));
}

void write_gamma_outputs(const GammaFitResult& result, const std::string& out_dir) {
    fs::create_directories(out_dir);

    std::string trace = "iteration,gamma,loss\n";
    for (const auto& point : result.trace) {
        trace += std::to_string(point.iteration);
        trace.push_back(',');
        trace += detail::format_double(point.gamma);
        trace.push_back(',');
        trace += detail::format_double(point.loss);
        trace.push_back('\n');
    }
    write_file(fs::path(out_dir) / "gamma_trace.csv", trace);

    std::string summary;
    summary += "gamma: " + detail::format_double(result.gamma) + "\n";
    summary += "iterations: " + std::to_string(result.iterations) + "\n";
    summary += std::string("converged: ") + (result.converged ? "yes" : "no (iteration cap)") + "\n";
    summary += "uniform-fallback samples: " + std::to_string(result.degenerate_events) + "\n";
    write_file(fs::path(out_dir) / "gamma_summary.txt", summary);
}

void write_combo_outputs(const ComboResult& result, const ComboConfig& cfg,
                         const std::string& out_dir) {
    fs::create_directories(out_dir);

    std::string scores = "candidate,mean_score";
    for (int f = 0; f < cfg.inner_folds; ++f) scores += ",fold_" + std::to_string(f);
    scores.push_back('\n');
    const double neg_inf = -std::numeric_limits<double>::infinity();
    auto cell = [neg_inf](double v) {
        return v == neg_inf ? std::string("x") : detail::format_double(v);
    };
    for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
        detail::append_csv_field(scores, cfg.candidates[c]);
        scores.push_back(',');
        scores += cell(result.scores[c]);
        for (double s : result.fold_scores[c]) {
            scores.push_back(',');
            scores += cell(s);
        }
        scores.push_back('\n');
    }
    write_file(fs::path(out_dir) / "combo_scores.csv", scores);

    std::string summary;
    summary += "winner: " + result.winner + "\n";
    summary += "winner index: " + std::to_string(result.winner_index) + "\n";
    summary += "inner folds: " + std::to_string(cfg.inner_folds) + "\n";
    summary += "pair evaluations: " + std::to_string(result.pair_evaluations) + "\n";
    write_file(fs::path(out_dir) / "combo_summary.txt", summary);
}

std::string serialize_fold_plan(const DecisionSystem& ds, const FoldPlan& plan) {
    std::string out = "sample,class,fold\n";
    for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
        out += std::to_string(i);
        out.push_back(',');
        detail::append_csv_field(out, ds.class_names[static_cast<std::size_t>(ds.classes[i])]);
        out.push_back(',');
        out += std::to_string(plan.assignment[i]);
        out.push_back('\n');
    }
    return out;
}

} // namespace frnn
