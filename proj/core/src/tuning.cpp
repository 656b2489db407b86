#include "frnn/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "frnn/classifier.hpp"
#include "frnn/errors.hpp"
#include "frnn/owa.hpp"
#include "frnn/rng.hpp"
#include "frnn/stats.hpp"

namespace frnn {
namespace {

/// Every class must keep >= k members and >= k non-members after any single
/// sample is removed, so that leave-one-out FRNN scores are defined.
void check_loo_preconditions(const DecisionSystem& train, int k) {
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(train.n_classes()), 0);
    for (int c : train.classes) ++counts[static_cast<std::size_t>(c)];
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < k + 1 || train.n_samples() - counts[c] < k + 1) {
            throw std::invalid_argument(
                "fit_gamma: class '" + train.class_names[c] +
                "' or its complement drops below k samples under leave-one-out");
        }
    }
}

Eigen::MatrixXd pairwise_euclidean(const Eigen::MatrixXd& rows) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd d(n, n);
    d.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double value = (rows.row(i) - rows.row(j)).norm();
            d(i, j) = value;
            d(j, i) = value;
        }
    }
    return d;
}

} // namespace

FrozenBatchLoss freeze_batch_loss(const Eigen::MatrixXd& distances, const std::vector<int>& classes,
                                  int n_classes, KernelFamily family, double gamma,
                                  const std::vector<Eigen::Index>& batch, int k) {
    if (!(gamma > 0)) throw std::invalid_argument("freeze_batch_loss: gamma must be positive");
    if (k < 1) throw std::invalid_argument("freeze_batch_loss: k must be >= 1");
    if (distances.rows() != distances.cols() ||
        distances.rows() != static_cast<Eigen::Index>(classes.size())) {
        throw std::invalid_argument("freeze_batch_loss: distance matrix does not match classes");
    }
    for (Eigen::Index v : batch) {
        if (v < 0 || v >= distances.rows()) {
            throw std::invalid_argument("freeze_batch_loss: batch index out of range");
        }
    }
    const KernelSpec spec{family, gamma};
    const OwaWeightVector upper = linear_upper_weights(k);
    const OwaWeightVector lower = linear_lower_weights(k);
    const auto n = static_cast<Eigen::Index>(classes.size());

    FrozenBatchLoss frozen;
    frozen.family_ = family;
    frozen.samples_.reserve(batch.size());

    // Kernel values sorted descending select both OWA windows: the upper
    // approximation takes the k most similar class members, the lower
    // approximation the k most similar non-members (their 1 - R values are
    // the k smallest). Ties keep index order.
    std::vector<std::pair<double, double>> member_vals;  // (kernel value, distance)
    std::vector<std::pair<double, double>> other_vals;
    for (Eigen::Index v : batch) {
        FrozenBatchLoss::Sample sample;
        sample.true_class = classes[static_cast<std::size_t>(v)];
        sample.class_terms.resize(static_cast<std::size_t>(n_classes));
        for (int c = 0; c < n_classes; ++c) {
            member_vals.clear();
            other_vals.clear();
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == v) continue;
                const double r = distances(v, j);
                const double value = kernel_of_distance(spec, r);
                if (classes[static_cast<std::size_t>(j)] == c) {
                    member_vals.emplace_back(value, r);
                } else {
                    other_vals.emplace_back(value, r);
                }
            }
            auto top_k = [k](std::vector<std::pair<double, double>>& vals) {
                if (vals.size() < static_cast<std::size_t>(k)) {
                    throw std::invalid_argument(
                        "freeze_batch_loss: a class or its complement has fewer than k samples "
                        "after excluding the batch sample");
                }
                std::stable_sort(vals.begin(), vals.end(),
                                 [](const auto& a, const auto& b) { return a.first > b.first; });
                vals.resize(static_cast<std::size_t>(k));
            };
            top_k(member_vals);
            top_k(other_vals);

            auto& terms = sample.class_terms[static_cast<std::size_t>(c)];
            terms.reserve(static_cast<std::size_t>(2 * k));
            for (int t = 0; t < k; ++t) {
                terms.push_back({member_vals[static_cast<std::size_t>(t)].second,
                                 upper.weights[static_cast<std::size_t>(t)], false});
            }
            // Position 0 holds the largest kernel value, i.e. the smallest
            // 1 - R, which receives the largest soft-min weight.
            for (int t = 0; t < k; ++t) {
                terms.push_back({other_vals[static_cast<std::size_t>(t)].second,
                                 lower.weights[static_cast<std::size_t>(k - 1 - t)], true});
            }
        }
        frozen.samples_.push_back(std::move(sample));
    }
    return frozen;
}

FrozenBatchLoss::Evaluation FrozenBatchLoss::evaluate(double gamma) const {
    if (!(gamma > 0)) throw std::invalid_argument("FrozenBatchLoss: gamma must be positive");
    const KernelSpec spec{family_, gamma};

    Evaluation eval;
    const auto n_classes =
        samples_.empty() ? 0 : static_cast<int>(samples_.front().class_terms.size());
    for (const auto& sample : samples_) {
        double sum = 0;
        double dsum = 0;
        double true_total = 0;
        double true_dtotal = 0;
        for (std::size_t c = 0; c < sample.class_terms.size(); ++c) {
            double total = 0;
            double dtotal = 0;
            for (const auto& term : sample.class_terms[c]) {
                const double value = kernel_of_distance(spec, term.distance);
                const double dvalue = kernel_gamma_derivative_of_distance(spec, term.distance);
                if (term.complement) {
                    total += term.weight * (1.0 - value);
                    dtotal -= term.weight * dvalue;
                } else {
                    total += term.weight * value;
                    dtotal += term.weight * dvalue;
                }
            }
            sum += total;
            dsum += dtotal;
            if (static_cast<int>(c) == sample.true_class) {
                true_total = total;
                true_dtotal = dtotal;
            }
        }
        // A collapsed score vector cannot be normalized; fall back to the
        // uniform distribution with a vanishing gradient so descent continues.
        if (true_total <= 0 || sum <= 0) {
            ++eval.degenerate_samples;
            eval.loss += std::log(static_cast<double>(n_classes));
            continue;
        }
        const double p = true_total / sum;
        eval.loss += -std::log(p);
        const double dp = (true_dtotal * sum - true_total * dsum) / (sum * sum);
        eval.gradient += -dp / p;
    }
    if (!samples_.empty()) {
        eval.loss /= static_cast<double>(samples_.size());
        eval.gradient /= static_cast<double>(samples_.size());
    }
    return eval;
}

FrozenBatchLoss freeze_batch_loss(const DecisionSystem& train, KernelFamily family, double gamma,
                                  const std::vector<Eigen::Index>& batch, int k_neighbours) {
    check_loo_preconditions(train, k_neighbours);
    return freeze_batch_loss(pairwise_euclidean(train.features), train.classes, train.n_classes(),
                             family, gamma, batch, k_neighbours);
}

double loo_cross_entropy(const DecisionSystem& train, KernelFamily family, double gamma,
                         int k_neighbours) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(train.n_samples()));
    std::iota(all.begin(), all.end(), 0);
    return freeze_batch_loss(train, family, gamma, all, k_neighbours).evaluate(gamma).loss;
}

GammaFitResult fit_gamma(const DecisionSystem& train, KernelFamily family,
                         const GradientDescentConfig& cfg, int k_neighbours) {
    if (!(cfg.initial_gamma > 0)) throw std::invalid_argument("fit_gamma: initial_gamma must be positive");
    if (cfg.batch_size < 1) throw std::invalid_argument("fit_gamma: batch_size must be >= 1");
    if (cfg.learning_rate < 0) throw std::invalid_argument("fit_gamma: learning_rate must be >= 0");
    if (cfg.max_iterations < 1) throw std::invalid_argument("fit_gamma: max_iterations must be >= 1");
    if (!(cfg.precision > 0)) throw std::invalid_argument("fit_gamma: precision must be positive");
    if (!(cfg.precision < cfg.initial_gamma)) {
        throw std::invalid_argument("fit_gamma: precision must be smaller than initial_gamma");
    }
    if (!(cfg.gamma_floor > 0)) throw std::invalid_argument("fit_gamma: gamma_floor must be positive");
    if (train.n_samples() < cfg.batch_size) {
        throw std::invalid_argument("fit_gamma: fewer training samples than the batch size");
    }
    check_loo_preconditions(train, k_neighbours);

    const Eigen::MatrixXd distances = pairwise_euclidean(train.features);
    const auto n = static_cast<std::size_t>(train.n_samples());
    const auto b = static_cast<std::size_t>(cfg.batch_size);

    std::mt19937_64 rng(cfg.seed);
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t position = n; // forces a shuffle before the first batch

    GammaFitResult result;
    double gamma = cfg.initial_gamma;
    std::vector<Eigen::Index> batch(b);
    for (int iteration = 1; iteration <= cfg.max_iterations; ++iteration) {
        // Epochs consist of floor(n / b) full batches drawn without
        // replacement; the remainder is dropped and the order reshuffled.
        if (position + b > n) {
            shuffle_inplace(order, rng);
            position = 0;
        }
        std::copy(order.begin() + static_cast<std::ptrdiff_t>(position),
                  order.begin() + static_cast<std::ptrdiff_t>(position + b), batch.begin());
        position += b;

        const FrozenBatchLoss frozen = freeze_batch_loss(
            distances, train.classes, train.n_classes(), family, gamma, batch, k_neighbours);
        const auto eval = frozen.evaluate(gamma);
        result.trace.push_back({iteration, gamma, eval.loss});
        result.degenerate_events += eval.degenerate_samples;
        result.iterations = iteration;

        const double next = std::max(cfg.gamma_floor, gamma - cfg.learning_rate * eval.gradient);
        const double delta = std::abs(next - gamma);
        gamma = next;
        if (delta < cfg.precision) {
            result.converged = true;
            break;
        }
    }
    result.gamma = gamma;
    return result;
}

ComboResult combo_select(const DecisionSystem& train, const ComboConfig& cfg, int k_neighbours) {
    if (cfg.candidates.size() < 2) {
        throw std::invalid_argument("combo: need at least 2 candidate relations");
    }
    if (cfg.inner_folds < 2) throw std::invalid_argument("combo: need at least 2 inner folds");
    for (const auto& name : cfg.candidates) {
        if (!is_known_relation_name(name)) {
            throw std::invalid_argument("combo: unknown candidate relation '" + name + "'");
        }
    }

    const FoldPlan plan = make_folds(train, cfg.inner_folds, cfg.seed);
    const double neg_inf = -std::numeric_limits<double>::infinity();

    ComboResult result;
    result.fold_scores.assign(cfg.candidates.size(),
                              std::vector<double>(static_cast<std::size_t>(cfg.inner_folds), neg_inf));

    for (int f = 0; f < cfg.inner_folds; ++f) {
        const auto train_rows = plan.train_indices(f);
        const auto test_rows = plan.test_indices(f);
        DecisionSystem inner_train = subset(train, train_rows);
        const DecisionSystem inner_test = subset(train, test_rows);

        const RangeNormalizer norm = fit_range_normalizer(inner_train);
        inner_train.features = apply_normalizer(norm, inner_train.features);
        const Eigen::MatrixXd test_features = apply_normalizer(norm, inner_test.features);

        for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
            try {
                std::shared_ptr<const IndiscernibilityRelation> relation =
                    build_named_relation(cfg.candidates[c], inner_train);
                const FrnnModel model = fit(inner_train, std::move(relation), k_neighbours);
                std::vector<int> y_pred;
                y_pred.reserve(static_cast<std::size_t>(test_features.rows()));
                for (Eigen::Index i = 0; i < test_features.rows(); ++i) {
                    y_pred.push_back(model.predict(test_features.row(i).transpose()));
                }
                result.pair_evaluations += static_cast<std::uint64_t>(test_features.rows()) *
                                           static_cast<std::uint64_t>(inner_train.n_samples());
                result.fold_scores[c][static_cast<std::size_t>(f)] =
                    balanced_accuracy(inner_test.classes, y_pred);
            } catch (const RelationUndefinedError&) {
                // Candidate undefined on this split; it keeps -inf here.
            } catch (const std::invalid_argument&) {
                // Classifier preconditions unmet on this split (e.g. a class
                // smaller than k); same treatment.
            }
        }
    }

    result.scores.resize(cfg.candidates.size());
    for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
        double sum = 0;
        for (double s : result.fold_scores[c]) sum += s;
        result.scores[c] = sum / static_cast<double>(cfg.inner_folds);
    }

    int best = 0;
    for (std::size_t c = 1; c < result.scores.size(); ++c) {
        if (result.scores[c] > result.scores[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(c);
        }
    }
    if (result.scores[static_cast<std::size_t>(best)] == neg_inf) {
        throw RelationUndefinedError("combo: every candidate failed on every inner fold");
    }
    result.winner_index = best;
    result.winner = cfg.candidates[static_cast<std::size_t>(best)];
    result.relation = build_named_relation(result.winner, train);
    return result;
}

} // namespace frnn
