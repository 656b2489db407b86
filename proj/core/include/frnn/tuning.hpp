#ifndef FRNN_TUNING_HPP
#define FRNN_TUNING_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "frnn/dataset.hpp"
#include "frnn/kernels.hpp"

namespace frnn {

struct GradientDescentConfig {
    double initial_gamma = 1.0;
    int batch_size = 10;
    double learning_rate = 0.01;
    int max_iterations = 10000;
    double precision = 1e-5;   // stop when |gamma update| falls below this
    std::uint64_t seed = 0;
    double gamma_floor = 1e-6; // projection keeping gamma strictly positive
};

/// The batch cross-entropy loss with the OWA sort permutations frozen at the
/// gamma the batch was assembled with. Within a neighbourhood of that gamma
/// this is a smooth function of gamma alone, so its analytic gradient (a
/// subgradient of the true piecewise loss) can be checked against finite
/// differences exactly.
class FrozenBatchLoss {
public:
    struct Evaluation {
        double loss = 0;
        double gradient = 0;        // d loss / d gamma
        int degenerate_samples = 0; // samples whose class totals summed to <= 0
    };

    /// Loss, gradient, and degenerate count at any gamma > 0 under the
    /// frozen permutations.
    Evaluation evaluate(double gamma) const;

    int batch_size() const { return static_cast<int>(samples_.size()); }

private:
    friend FrozenBatchLoss freeze_batch_loss(const Eigen::MatrixXd& pairwise_distances,
                                             const std::vector<int>& classes, int n_classes,
                                             KernelFamily family, double gamma,
                                             const std::vector<Eigen::Index>& batch,
                                             int k_neighbours);
    struct Term {
        double distance;
        double weight;
        bool complement; // contributes weight * (1 - k(r)) instead of weight * k(r)
    };
    struct Sample {
        int true_class;
        std::vector<std::vector<Term>> class_terms; // per class: the 2k frozen OWA terms
    };

    KernelFamily family_ = KernelFamily::Gaussian;
    std::vector<Sample> samples_;
};

/// Assembles the frozen loss for the given batch rows: per sample, the
/// leave-one-out FRNN class totals against train minus that sample, with the
/// OWA selections fixed by the kernel values at `gamma`. Requires every
/// class and every class complement to keep at least k_neighbours members
/// after removing any single sample.
FrozenBatchLoss freeze_batch_loss(const DecisionSystem& train, KernelFamily family, double gamma,
                                  const std::vector<Eigen::Index>& batch, int k_neighbours = 3);

/// Same, over a precomputed Euclidean distance matrix (pairwise_distances
/// must be square and match classes in size). Lets callers amortise the
/// distance computation across iterations.
FrozenBatchLoss freeze_batch_loss(const Eigen::MatrixXd& pairwise_distances,
                                  const std::vector<int>& classes, int n_classes,
                                  KernelFamily family, double gamma,
                                  const std::vector<Eigen::Index>& batch, int k_neighbours = 3);

/// Deterministic full-train leave-one-out mean cross-entropy at a fixed
/// gamma (every sample forms its own frozen batch).
double loo_cross_entropy(const DecisionSystem& train, KernelFamily family, double gamma,
                         int k_neighbours = 3);

struct GammaTracePoint {
    int iteration;   // 1-based
    double gamma;    // value the batch loss was evaluated at
    double loss;
};

struct GammaFitResult {
    double gamma = 0;  // final, >= gamma_floor
    std::vector<GammaTracePoint> trace;
    int iterations = 0;
    bool converged = false;        // stopped by the precision rule
    int degenerate_events = 0;     // uniform-fallback samples seen during descent
};

/// Gradient-descent fit of a kernel gamma against the leave-one-out
/// cross-entropy. Batches are drawn without replacement from a seeded
/// shuffle, reshuffling each epoch; each iteration takes one frozen-batch
/// gradient step gamma <- max(gamma_floor, gamma - learning_rate * grad) and
/// stops when the update magnitude drops below cfg.precision or
/// max_iterations is reached.
GammaFitResult fit_gamma(const DecisionSystem& train, KernelFamily family,
                         const GradientDescentConfig& cfg, int k_neighbours = 3);

struct ComboConfig {
    std::vector<std::string> candidates; // relation names, order = tie-break priority
    int inner_folds = 5;
    std::uint64_t seed = 0;
};

struct ComboResult {
    std::string winner;
    int winner_index = -1;
    std::vector<double> scores; // mean balanced accuracy per candidate; -inf when unbuildable
    std::vector<std::vector<double>> fold_scores; // [candidate][fold]; -inf on failure
    std::uint64_t pair_evaluations = 0; // relation evaluations spent on inner scoring
    std::unique_ptr<IndiscernibilityRelation> relation; // winner rebuilt on the full training set
};

/// Treats the relation as a hyperparameter: stratified inner cross-validation
/// on the training set scores each candidate by mean balanced accuracy, the
/// argmax wins (ties toward the earlier list position) and is rebuilt on the
/// full training set. A candidate that fails on a fold (undefined relation or
/// unmet classifier preconditions) scores -inf there. Throws when every
/// candidate fails everywhere.
ComboResult combo_select(const DecisionSystem& train, const ComboConfig& cfg, int k_neighbours);

} // namespace frnn

#endif
