// frnn: command-line driver for the OWA fuzzy-rough nearest neighbour
// toolkit. Subcommands: evaluate, compare, fit-gamma, combo, folds.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 all runs failed.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frnn/config.hpp"
#include "frnn/dataset.hpp"
#include "frnn/errors.hpp"
#include "frnn/experiment.hpp"
#include "frnn/kernels.hpp"
#include "frnn/stats.hpp"
#include "frnn/tuning.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_all_failed = 3;

constexpr const char* default_relations = "man,euc,che,can,cos,pcc,mah,csmbr";

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    auto flush = [&] {
        const auto begin = current.find_first_not_of(" \t");
        if (begin != std::string::npos) {
            const auto end = current.find_last_not_of(" \t");
            parts.push_back(current.substr(begin, end - begin + 1));
        }
        current.clear();
    };
    for (char c : text) {
        if (c == ',') {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    return parts;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw frnn::ParseError("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Directories expand to their contained .dat/.csv/.arff files, sorted.
std::vector<std::string> expand_data_args(const std::vector<std::string>& args) {
    std::vector<std::string> paths;
    for (const auto& arg : args) {
        if (fs::is_directory(arg)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(arg)) {
                if (!entry.is_regular_file()) continue;
                const std::string ext = entry.path().extension().string();
                if (ext == ".dat" || ext == ".csv" || ext == ".arff") {
                    found.push_back(entry.path().string());
                }
            }
            std::sort(found.begin(), found.end());
            if (found.empty()) {
                throw frnn::ParseError("no dataset files (.dat/.csv/.arff) in directory: " + arg);
            }
            paths.insert(paths.end(), found.begin(), found.end());
        } else {
            paths.push_back(arg);
        }
    }
    return paths;
}

std::map<std::string, std::string> load_config_map(const std::string& path) {
    if (path.empty()) return {};
    return frnn::parse_config_text(read_text_file(path));
}

std::string fixed6(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

/// Runs the data-touching part of a subcommand, mapping exceptions onto the
/// documented exit codes.
template <typename Body>
int run_mapped(Body&& body) {
    try {
        return body();
    } catch (const frnn::RelationUndefinedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_all_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    }
}

struct EvaluateOptions {
    std::vector<std::string> data;
    std::string relations = default_relations;
    int k = 3;
    int folds = 10;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
    double time_budget = 0;
    std::string target;
    bool no_normalize = false;
};

int cmd_evaluate(const EvaluateOptions& options) {
    frnn::ExperimentConfig cfg;
    try {
        cfg.relation_names = split_commas(options.relations);
        if (cfg.relation_names.empty()) {
            throw std::invalid_argument("--relations needs at least one name");
        }
        for (const auto& name : cfg.relation_names) frnn::validate_relation_name(name);
        frnn::apply_config(load_config_map(options.config_path), cfg.gd, cfg.combo);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    cfg.k = options.k;
    cfg.n_folds = options.folds;
    cfg.seed = options.seed;
    cfg.normalize = !options.no_normalize;
    cfg.out_dir = options.out;
    cfg.time_budget_seconds = options.time_budget;
    cfg.csv_target = options.target;

    return run_mapped([&] {
        cfg.dataset_paths = expand_data_args(options.data);
        const frnn::EvaluateOutcome outcome = frnn::run_evaluate(cfg, &std::cerr);
        frnn::write_evaluate_outputs(outcome, options.out);

        int missing = 0;
        for (const auto& row : outcome.matrix.cells) {
            for (const auto& cell : row) {
                if (!cell) ++missing;
            }
        }
        std::cout << "evaluated " << outcome.matrix.datasets.size() << " dataset(s) x "
                  << outcome.matrix.methods.size() << " relation(s), " << missing
                  << " missing cell(s)\n";
        std::cout << "wrote " << (fs::path(options.out) / "results.csv").string() << " and "
                  << (fs::path(options.out) / "runs.csv").string() << "\n";
        if (outcome.all_failed()) {
            std::cerr << "error: every run failed\n";
            return exit_all_failed;
        }
        return 0;
    });
}

struct CompareOptions {
    std::vector<std::string> data;
    std::string out;
    std::string policy = "complete-case";
};

int cmd_compare(const CompareOptions& options) {
    const frnn::MissingPolicy policy = options.policy == "worst-rank"
                                           ? frnn::MissingPolicy::WorstRank
                                           : frnn::MissingPolicy::CompleteCase;
    return run_mapped([&] {
        for (const auto& path : options.data) {
            frnn::ResultMatrix matrix;
            try {
                matrix = frnn::parse_result_matrix_csv(read_text_file(path));
            } catch (const frnn::ParseError& e) {
                throw frnn::ParseError(path + ": " + e.what());
            }
            const frnn::ComparisonReport report = frnn::compare_methods(matrix, policy);
            const std::string stem = fs::path(path).stem().string();
            frnn::write_comparison_outputs(report, options.out, stem);
            std::cout << "== " << path << " ==\n" << frnn::comparison_report_text(report) << "\n";
        }
        return 0;
    });
}

struct FitGammaOptions {
    std::string data;
    std::string kernel = "gauss";
    int k = 3;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
    std::string target;
    bool no_normalize = false;
};

int cmd_fit_gamma(const FitGammaOptions& options, bool seed_given) {
    frnn::GradientDescentConfig gd;
    frnn::ComboConfig combo;
    try {
        const auto config = load_config_map(options.config_path);
        frnn::apply_config(config, gd, combo);
        if (seed_given || !config.contains("gd.seed")) gd.seed = options.seed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    const auto family = frnn::kernel_family_from_string(options.kernel);

    return run_mapped([&] {
        frnn::DecisionSystem ds = frnn::load_dataset_checked(options.data, options.target);
        if (!options.no_normalize) {
            const frnn::RangeNormalizer norm = frnn::fit_range_normalizer(ds);
            ds.features = frnn::apply_normalizer(norm, ds.features);
        }
        const frnn::GammaFitResult result = frnn::fit_gamma(ds, *family, gd, options.k);
        if (!options.out.empty()) frnn::write_gamma_outputs(result, options.out);
        std::cout << "gamma: " << fixed6(result.gamma) << " after " << result.iterations
                  << " iteration(s)" << (result.converged ? "" : " (iteration cap reached)")
                  << "\n";
        if (result.degenerate_events > 0) {
            std::cout << "uniform-fallback samples during descent: " << result.degenerate_events
                      << "\n";
        }
        if (!options.out.empty()) {
            std::cout << "wrote " << (fs::path(options.out) / "gamma_trace.csv").string()
                      << " and " << (fs::path(options.out) / "gamma_summary.txt").string() << "\n";
        }
        return 0;
    });
}

struct ComboOptions {
    std::string data;
    std::string relations;
    int k = 3;
    int folds = 5;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
    std::string target;
    bool no_normalize = false;
};

int cmd_combo(const ComboOptions& options, bool relations_given, bool folds_given,
              bool seed_given) {
    frnn::GradientDescentConfig gd;
    frnn::ComboConfig combo;
    try {
        const auto config = load_config_map(options.config_path);
        frnn::apply_config(config, gd, combo);
        if (seed_given || !config.contains("combo.seed")) combo.seed = options.seed;
        if (folds_given || !config.contains("combo.folds")) combo.inner_folds = options.folds;
        if (relations_given || combo.candidates.empty()) {
            combo.candidates = split_commas(
                options.relations.empty() ? default_relations : options.relations);
        }
        if (combo.candidates.size() < 2) {
            throw std::invalid_argument("combo needs at least two candidate relations");
        }
        for (const auto& name : combo.candidates) frnn::validate_relation_name(name);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    return run_mapped([&] {
        frnn::DecisionSystem ds = frnn::load_dataset_checked(options.data, options.target);
        if (!options.no_normalize) {
            const frnn::RangeNormalizer norm = frnn::fit_range_normalizer(ds);
            ds.features = frnn::apply_normalizer(norm, ds.features);
        }
        const frnn::ComboResult result = frnn::combo_select(ds, combo, options.k);
        if (!options.out.empty()) frnn::write_combo_outputs(result, combo, options.out);
        std::cout << "winner: " << result.winner << " (mean balanced accuracy "
                  << fixed6(result.scores[static_cast<std::size_t>(result.winner_index)])
                  << " over " << combo.inner_folds << " inner folds)\n";
        if (!options.out.empty()) {
            std::cout << "wrote " << (fs::path(options.out) / "combo_scores.csv").string()
                      << " and " << (fs::path(options.out) / "combo_summary.txt").string() << "\n";
        }
        return 0;
    });
}

struct FoldsOptions {
    std::string data;
    int folds = 10;
    std::uint64_t seed = 0;
    std::string out;
    std::string target;
};

int cmd_folds(const FoldsOptions& options) {
    return run_mapped([&] {
        const frnn::DecisionSystem ds = frnn::load_dataset_checked(options.data, options.target);
        const frnn::FoldPlan plan = frnn::make_folds(ds, options.folds, options.seed);
        const std::string text = frnn::serialize_fold_plan(ds, plan);
        if (options.out.empty()) {
            std::cout << text;
        } else {
            const fs::path path(options.out);
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write output file: " + options.out);
            out << text;
        }
        return 0;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OWA fuzzy-rough nearest neighbour classification toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "frnn 0.1.0");

    EvaluateOptions evaluate_options;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Cross-validated balanced accuracy per dataset and relation");
    evaluate->add_option("--data", evaluate_options.data, "Dataset files or directories")
        ->required();
    evaluate->add_option("--relations", evaluate_options.relations,
                         "Comma-separated relation names")
        ->capture_default_str();
    evaluate->add_option("--k", evaluate_options.k, "Neighbours per approximation")->capture_default_str()
        ->check(CLI::Range(1, 1000000));
    evaluate->add_option("--folds", evaluate_options.folds, "Cross-validation folds")->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    evaluate->add_option("--seed", evaluate_options.seed, "Fold-assignment seed")->capture_default_str();
    evaluate->add_option("--out", evaluate_options.out, "Output directory")->required();
    evaluate->add_option("--config", evaluate_options.config_path, "Key-value config file");
    evaluate->add_option("--time-budget", evaluate_options.time_budget,
                         "Seconds per dataset x relation, 0 = unlimited")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    evaluate->add_option("--target", evaluate_options.target,
                         "Decision column for CSV data (default: last column)");
    evaluate->add_flag("--no-normalize", evaluate_options.no_normalize,
                       "Skip per-fold range normalization");

    CompareOptions compare_options;
    auto* compare =
        app.add_subcommand("compare", "Friedman + Conover-Holm comparison of a result matrix");
    compare->add_option("--data", compare_options.data, "Result matrix CSV files")->required();
    compare->add_option("--out", compare_options.out, "Output directory")->required();
    compare->add_option("--policy", compare_options.policy, "Treatment of missing cells")->capture_default_str()
        ->check(CLI::IsMember({"complete-case", "worst-rank"}));

    FitGammaOptions fit_options;
    auto* fit_gamma =
        app.add_subcommand("fit-gamma", "Gradient-descent kernel gamma fit on one dataset");
    fit_gamma->add_option("--data", fit_options.data, "Dataset file")->required();
    fit_gamma->add_option("--kernel", fit_options.kernel, "Kernel family")->capture_default_str()
        ->check(CLI::IsMember({"gauss", "exp", "rat", "circle", "sphere"}));
    fit_gamma->add_option("--k", fit_options.k, "Neighbours per approximation")->capture_default_str()
        ->check(CLI::Range(1, 1000000));
    auto* fit_seed =
        fit_gamma->add_option("--seed", fit_options.seed, "Batch-shuffle seed")->capture_default_str();
    fit_gamma->add_option("--out", fit_options.out, "Output directory (optional)");
    fit_gamma->add_option("--config", fit_options.config_path, "Key-value config file");
    fit_gamma->add_option("--target", fit_options.target,
                          "Decision column for CSV data (default: last column)");
    fit_gamma->add_flag("--no-normalize", fit_options.no_normalize,
                        "Skip range normalization of the dataset");

    ComboOptions combo_options;
    auto* combo = app.add_subcommand(
        "combo", "Inner cross-validation selection of the best relation candidate");
    combo->add_option("--data", combo_options.data, "Dataset file")->required();
    auto* combo_relations = combo->add_option("--relations", combo_options.relations,
                                              "Comma-separated candidate relations");
    combo->add_option("--k", combo_options.k, "Neighbours per approximation")->capture_default_str()
        ->check(CLI::Range(1, 1000000));
    auto* combo_folds =
        combo->add_option("--folds", combo_options.folds, "Inner cross-validation folds")->capture_default_str()
            ->check(CLI::Range(2, 1000000));
    auto* combo_seed = combo->add_option("--seed", combo_options.seed, "Inner-fold seed")->capture_default_str();
    combo->add_option("--out", combo_options.out, "Output directory (optional)");
    combo->add_option("--config", combo_options.config_path, "Key-value config file");
    combo->add_option("--target", combo_options.target,
                      "Decision column for CSV data (default: last column)");
    combo->add_flag("--no-normalize", combo_options.no_normalize,
                    "Skip range normalization of the dataset");

    FoldsOptions folds_options;
    auto* folds = app.add_subcommand("folds", "Print the stratified fold assignment");
    folds->add_option("--data", folds_options.data, "Dataset file")->required();
    folds->add_option("--folds", folds_options.folds, "Cross-validation folds")->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    folds->add_option("--seed", folds_options.seed, "Fold-assignment seed")->capture_default_str();
    folds->add_option("--out", folds_options.out, "Output file (stdout when omitted)");
    folds->add_option("--target", folds_options.target,
                      "Decision column for CSV data (default: last column)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    if (*evaluate) return cmd_evaluate(evaluate_options);
    if (*compare) return cmd_compare(compare_options);
    if (*fit_gamma) return cmd_fit_gamma(fit_options, fit_seed->count() > 0);
    if (*combo) {
        return cmd_combo(combo_options, combo_relations->count() > 0, combo_folds->count() > 0,
                         combo_seed->count() > 0);
    }
    if (*folds) return cmd_folds(folds_options);
    return exit_usage;
}
