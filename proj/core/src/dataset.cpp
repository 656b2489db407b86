#include "frnn/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "detail_csv.hpp"
#include "detail_format.hpp"
#include "frnn/errors.hpp"
#include "frnn/rng.hpp"

namespace frnn {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<double> parse_number(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return std::nullopt;
    double value = 0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            tokens.push_back(line.substr(start));
            break;
        }
        tokens.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return tokens;
}

int class_index(std::vector<std::string>& class_names, const std::string& label) {
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (class_names[i] == label) return static_cast<int>(i);
    }
    class_names.push_back(label);
    return static_cast<int>(class_names.size() - 1);
}

DecisionSystem assemble(std::vector<std::vector<double>> feature_rows,
                        std::vector<std::string> labels, std::vector<std::string> feature_names) {
    if (feature_rows.empty()) throw ParseError("dataset has no data rows");
    if (feature_names.empty()) throw ParseError("dataset has no numeric conditional attributes");

    DecisionSystem ds;
    ds.feature_names = std::move(feature_names);
    ds.features.resize(static_cast<Eigen::Index>(feature_rows.size()),
                       static_cast<Eigen::Index>(ds.feature_names.size()));
    for (std::size_t i = 0; i < feature_rows.size(); ++i) {
        for (std::size_t j = 0; j < feature_rows[i].size(); ++j) {
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                feature_rows[i][j];
        }
    }
    ds.classes.reserve(labels.size());
    for (const auto& label : labels) ds.classes.push_back(class_index(ds.class_names, label));
    if (ds.class_names.size() < 2) {
        throw ParseError("decision attribute has a single class: '" + ds.class_names.front() +
                         "'");
    }
    return ds;
}

} // namespace

DecisionSystem parse_keel(const std::string& text) {
    struct Attribute {
        std::string name;
        bool numeric;
    };
    std::vector<Attribute> attributes;
    bool saw_relation = false;
    std::size_t data_start = 0;
    bool in_data = false;

    const auto lines = split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        std::string_view line = trim(lines[li]);
        if (line.empty() || line.front() == '%') continue;
        if (line.front() != '@') {
            throw ParseError("line " + std::to_string(li + 1) + ": expected a header line");
        }
        std::size_t space = line.find_first_of(" \t");
        std::string keyword = lower(space == std::string_view::npos ? line : line.substr(0, space));
        std::string_view rest =
            space == std::string_view::npos ? std::string_view{} : trim(line.substr(space + 1));
        if (keyword == "@relation") {
            saw_relation = true;
        } else if (keyword == "@attribute") {
            if (rest.empty()) {
                throw ParseError("line " + std::to_string(li + 1) + ": @attribute without a name");
            }
            std::size_t name_end = rest.find_first_of(" \t{[");
            std::string name(trim(rest.substr(0, name_end)));
            std::string_view type_spec =
                name_end == std::string_view::npos ? std::string_view{} : trim(rest.substr(name_end));
            std::string type_lower = lower(type_spec);
            bool numeric = type_lower.rfind("real", 0) == 0 ||
                           type_lower.rfind("integer", 0) == 0 ||
                           type_lower.rfind("numeric", 0) == 0;
            attributes.push_back({std::move(name), numeric});
        } else if (keyword == "@inputs" || keyword == "@outputs") {
            // Declaration order already fixes the roles; these are ignored.
        } else if (keyword == "@data") {
            data_start = li + 1;
            in_data = true;
            break;
        } else {
            throw ParseError("line " + std::to_string(li + 1) + ": unknown keyword '" + keyword +
                             "'");
        }
    }
    if (!in_data) throw ParseError("missing @data section");
    if (!saw_relation) throw ParseError("missing @relation header");
    if (attributes.size() < 2) {
        throw ParseError("need at least one conditional attribute and a decision attribute");
    }

    const std::size_t n_attributes = attributes.size();
    std::vector<std::string> feature_names;
    std::vector<std::size_t> feature_columns;
    for (std::size_t j = 0; j + 1 < n_attributes; ++j) {
        if (attributes[j].numeric) {
            feature_names.push_back(attributes[j].name);
            feature_columns.push_back(j);
        }
    }

    std::vector<std::vector<double>> feature_rows;
    std::vector<std::string> labels;
    for (std::size_t li = data_start; li < lines.size(); ++li) {
        std::string_view line = trim(lines[li]);
        if (line.empty() || line.front() == '%') continue;
        auto tokens = split_commas(line);
        if (tokens.size() != n_attributes) {
            throw ParseError("line " + std::to_string(li + 1) + ": expected " +
                             std::to_string(n_attributes) + " values, got " +
                             std::to_string(tokens.size()));
        }
        std::vector<double> row;
        row.reserve(feature_columns.size());
        for (std::size_t j : feature_columns) {
            auto value = parse_number(tokens[j]);
            if (!value) {
                throw ParseError("line " + std::to_string(li + 1) + ": non-numeric value '" +
                                 std::string(trim(tokens[j])) + "' in numeric attribute '" +
                                 attributes[j].name + "'");
            }
            row.push_back(*value);
        }
        feature_rows.push_back(std::move(row));
        labels.emplace_back(trim(tokens[n_attributes - 1]));
    }
    if (feature_rows.empty()) throw ParseError("empty @data section");
    return assemble(std::move(feature_rows), std::move(labels), std::move(feature_names));
}

DecisionSystem parse_csv(const std::string& text, const std::string& target_column) {
    auto records = detail::parse_csv_records(text);
    if (records.empty()) throw ParseError("CSV is empty");
    const auto& header = records[0];
    if (records.size() < 2) throw ParseError("CSV has a header but no data rows");

    std::size_t target = header.size();
    if (target_column.empty()) {
        target = header.size() - 1;
    } else {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == target_column) {
                target = j;
                break;
            }
        }
        if (target == header.size()) {
            throw ParseError("target column '" + target_column + "' not found in CSV header");
        }
    }

    const std::size_t n_columns = header.size();
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != n_columns) {
            throw ParseError("CSV row " + std::to_string(i + 1) + " has " +
                             std::to_string(records[i].size()) + " fields, header has " +
                             std::to_string(n_columns));
        }
    }

    // A non-target column is numeric when every value in it parses as a
    // finite number; other columns are categorical and dropped.
    std::vector<std::size_t> feature_columns;
    std::vector<std::string> feature_names;
    for (std::size_t j = 0; j < n_columns; ++j) {
        if (j == target) continue;
        bool numeric = true;
        for (std::size_t i = 1; i < records.size() && numeric; ++i) {
            numeric = parse_number(records[i][j]).has_value();
        }
        if (numeric) {
            feature_columns.push_back(j);
            feature_names.push_back(header[j]);
        }
    }

    std::vector<std::vector<double>> feature_rows;
    std::vector<std::string> labels;
    feature_rows.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        std::vector<double> row;
        row.reserve(feature_columns.size());
        for (std::size_t j : feature_columns) row.push_back(*parse_number(records[i][j]));
        feature_rows.push_back(std::move(row));
        labels.push_back(records[i][target]);
    }
    return assemble(std::move(feature_rows), std::move(labels), std::move(feature_names));
}

std::string serialize_csv(const DecisionSystem& ds, const std::string& target_name) {
    std::string out;
    for (const auto& name : ds.feature_names) {
        detail::append_csv_field(out, name);
        out.push_back(',');
    }
    detail::append_csv_field(out, target_name);
    out.push_back('\n');
    for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
        for (Eigen::Index j = 0; j < ds.n_features(); ++j) {
            out.append(detail::format_double(ds.features(i, j)));
            out.push_back(',');
        }
        detail::append_csv_field(out,
                                 ds.class_names[static_cast<std::size_t>(
                                     ds.classes[static_cast<std::size_t>(i)])]);
        out.push_back('\n');
    }
    return out;
}

DecisionSystem load_dataset(const std::string& path, const std::string& target_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read dataset file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::string ext;
    if (auto dot = path.find_last_of('.'); dot != std::string::npos) ext = lower(path.substr(dot));
    if (ext == ".dat" || ext == ".arff") return parse_keel(text);
    return parse_csv(text, target_column);
}

RangeNormalizer fit_range_normalizer(const DecisionSystem& train) {
    if (train.n_samples() < 1) throw std::invalid_argument("fit_range_normalizer: empty data");
    RangeNormalizer norm;
    norm.minimum = train.features.colwise().minCoeff();
    norm.range = train.features.colwise().maxCoeff() - norm.minimum.transpose();
    return norm;
}

Eigen::MatrixXd apply_normalizer(const RangeNormalizer& norm, const Eigen::MatrixXd& data) {
    if (data.cols() != norm.minimum.size()) {
        throw std::invalid_argument("apply_normalizer: column count does not match the fit");
    }
    Eigen::MatrixXd out(data.rows(), data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        if (norm.range(j) > 0) {
            out.col(j) = (data.col(j).array() - norm.minimum(j)) / norm.range(j);
        } else {
            out.col(j).setZero();
        }
    }
    return out;
}

std::vector<std::vector<Eigen::Index>> FoldPlan::fold_indices() const {
    std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(n_folds));
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        folds[static_cast<std::size_t>(assignment[i])].push_back(static_cast<Eigen::Index>(i));
    }
    return folds;
}

std::vector<Eigen::Index> FoldPlan::train_indices(int fold) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return rows;
}

std::vector<Eigen::Index> FoldPlan::test_indices(int fold) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return rows;
}

FoldPlan make_folds(const DecisionSystem& ds, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw std::invalid_argument("make_folds: n_folds must be >= 2");
    if (static_cast<Eigen::Index>(n_folds) > ds.n_samples()) {
        throw std::invalid_argument("make_folds: more folds than samples");
    }

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignment.assign(static_cast<std::size_t>(ds.n_samples()), 0);

    std::mt19937_64 rng(seed);
    // Deal each class round-robin, every class continuing from the fold
    // after the one the previous class stopped at. This keeps the per-class
    // counts balanced and the overall fold sizes within one of each other.
    int offset = 0;
    for (int c = 0; c < ds.n_classes(); ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < ds.classes.size(); ++i) {
            if (ds.classes[i] == c) rows.push_back(i);
        }
        shuffle_inplace(rows, rng);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            plan.assignment[rows[j]] = (offset + static_cast<int>(j % static_cast<std::size_t>(n_folds))) % n_folds;
        }
        offset = (offset + static_cast<int>(rows.size() % static_cast<std::size_t>(n_folds))) % n_folds;
    }
    return plan;
}

DecisionSystem subset(const DecisionSystem& ds, const std::vector<Eigen::Index>& rows) {
    DecisionSystem out;
    out.class_names = ds.class_names;
    out.feature_names = ds.feature_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.n_features());
    out.classes.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
        out.classes.push_back(ds.classes[static_cast<std::size_t>(rows[i])]);
    }
    return out;
}

} // namespace frnn
