#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "frnn/classifier.hpp"
#include "frnn/errors.hpp"
#include "frnn/kernels.hpp"
#include "frnn/stats.hpp"
#include "frnn/synthetic.hpp"
#include "frnn/tuning.hpp"

using namespace frnn;

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Duplicate points across classes plus a compact-support kernel collapse a
// sample's class scores: its own class is out of reach, the imposters sit at
// distance zero.
DecisionSystem collapsing_data() {
    DecisionSystem ds;
    ds.features.resize(8, 1);
    ds.features << 0.0, 5.0, 6.0, 7.0, 0.0, 0.0, 0.0, 0.0;
    ds.classes = {0, 0, 0, 0, 1, 1, 1, 1};
    ds.class_names = {"a", "b"};
    ds.feature_names = {"f0"};
    return ds;
}

} // namespace

TEST_SUITE("tuning") {

TEST_CASE("frozen batch gradients match central finite differences") {
    const DecisionSystem train = synthetic_gaussians(50, 2, 2.0, 77);
    std::vector<Eigen::Index> batch{0, 3, 8, 15, 21, 34};
    for (KernelFamily family : {KernelFamily::Gaussian, KernelFamily::Exponential,
                                KernelFamily::RationalQuadratic}) {
        for (double gamma : {0.4, 1.0, 2.5}) {
            CAPTURE(to_string(family));
            CAPTURE(gamma);
            const FrozenBatchLoss frozen = freeze_batch_loss(train, family, gamma, batch, 3);
            CHECK(frozen.batch_size() == 6);
            const double h = 1e-6 * gamma;
            const double fd =
                (frozen.evaluate(gamma + h).loss - frozen.evaluate(gamma - h).loss) / (2 * h);
            const auto eval = frozen.evaluate(gamma);
            CHECK(eval.degenerate_samples == 0);
            CHECK(eval.gradient == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("collapsed class scores fall back to a uniform distribution") {
    const DecisionSystem ds = collapsing_data();
    // Sample 0 (class a at x = 0): its class lives 5+ away, all four class-b
    // points coincide with it. With a circular kernel of support 0.5 the
    // class-a total is exactly zero.
    const FrozenBatchLoss frozen =
        freeze_batch_loss(ds, KernelFamily::Circular, 0.5, {0}, 3);
    const auto eval = frozen.evaluate(0.5);
    CHECK(eval.degenerate_samples == 1);
    CHECK(eval.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(eval.gradient == 0.0);

    // The same point under a Gaussian kernel keeps a positive class total.
    const FrozenBatchLoss gauss =
        freeze_batch_loss(ds, KernelFamily::Gaussian, 1.0, {0}, 3);
    CHECK(gauss.evaluate(1.0).degenerate_samples == 0);

    // A class-b sample is fine even under the circular kernel.
    const FrozenBatchLoss other =
        freeze_batch_loss(ds, KernelFamily::Circular, 0.5, {5}, 3);
    CHECK(other.evaluate(0.5).degenerate_samples == 0);
}

TEST_CASE("freeze_batch_loss validates its inputs") {
    const DecisionSystem train = synthetic_gaussians(20, 2, 2.0, 5);
    CHECK_THROWS_AS(freeze_batch_loss(train, KernelFamily::Gaussian, 0.0, {0}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(freeze_batch_loss(train, KernelFamily::Gaussian, 1.0, {0}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(freeze_batch_loss(train, KernelFamily::Gaussian, 1.0, {99}, 3),
                    std::invalid_argument);

    // The matrix overload rejects classes that cannot fill a top-k window.
    Eigen::MatrixXd d(3, 3);
    d.setZero();
    d(0, 1) = d(1, 0) = 1.0;
    d(0, 2) = d(2, 0) = 2.0;
    d(1, 2) = d(2, 1) = 1.5;
    const std::vector<int> classes{0, 0, 1};
    CHECK_THROWS_AS(
        freeze_batch_loss(d, classes, 2, KernelFamily::Gaussian, 1.0, {0}, 2),
        std::invalid_argument);
    CHECK_NOTHROW(freeze_batch_loss(d, classes, 2, KernelFamily::Gaussian, 1.0, {0}, 1));
}

TEST_CASE("loo cross-entropy is the mean frozen loss over all samples") {
    const DecisionSystem train = synthetic_gaussians(24, 2, 3.0, 9);
    std::vector<Eigen::Index> all(24);
    std::iota(all.begin(), all.end(), 0);
    const double direct =
        freeze_batch_loss(train, KernelFamily::Gaussian, 0.8, all, 3).evaluate(0.8).loss;
    CHECK(loo_cross_entropy(train, KernelFamily::Gaussian, 0.8, 3) ==
          doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("zero learning rate converges immediately at the initial gamma") {
    const DecisionSystem train = synthetic_gaussians(40, 2, 3.0, 11);
    GradientDescentConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.seed = 4;
    const GammaFitResult result = fit_gamma(train, KernelFamily::Gaussian, cfg, 3);
    CHECK(result.gamma == 1.0);
    CHECK(result.iterations == 1);
    CHECK(result.converged);
    REQUIRE(result.trace.size() == 1);
    CHECK(result.trace[0].iteration == 1);
    CHECK(result.trace[0].gamma == 1.0);
}

TEST_CASE("descent reduces the loss on separable data and respects the floor") {
    const DecisionSystem train = synthetic_gaussians(60, 2, 3.0, 42);
    GradientDescentConfig cfg;
    cfg.max_iterations = 400;
    cfg.seed = 1;
    for (KernelFamily family : {KernelFamily::Gaussian, KernelFamily::Exponential,
                                KernelFamily::RationalQuadratic}) {
        CAPTURE(to_string(family));
        const GammaFitResult result = fit_gamma(train, family, cfg, 3);
        CHECK(result.gamma >= cfg.gamma_floor);
        CHECK(result.iterations >= 1);
        CHECK(result.iterations <= cfg.max_iterations);
        REQUIRE(!result.trace.empty());
        CHECK(result.trace.back().loss <= result.trace.front().loss + 1e-12);
        // The trace starts at the initial gamma and is 1-based.
        CHECK(result.trace.front().gamma == cfg.initial_gamma);
        for (std::size_t i = 0; i < result.trace.size(); ++i) {
            CHECK(result.trace[i].iteration == static_cast<int>(i) + 1);
        }
    }
}

TEST_CASE("fit_gamma is deterministic in the seed") {
    const DecisionSystem train = synthetic_gaussians(30, 2, 2.0, 8);
    GradientDescentConfig cfg;
    cfg.max_iterations = 50;
    cfg.seed = 123;
    const GammaFitResult a = fit_gamma(train, KernelFamily::Gaussian, cfg, 3);
    const GammaFitResult b = fit_gamma(train, KernelFamily::Gaussian, cfg, 3);
    CHECK(a.gamma == b.gamma);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].gamma == b.trace[i].gamma);
        CHECK(a.trace[i].loss == b.trace[i].loss);
    }
}

TEST_CASE("fit_gamma validates its configuration") {
    const DecisionSystem train = synthetic_gaussians(30, 2, 2.0, 8);
    const auto expect_throw = [&](auto mutate, const char* what) {
        GradientDescentConfig cfg;
        mutate(cfg);
        CAPTURE(what);
        CHECK_THROWS_AS(fit_gamma(train, KernelFamily::Gaussian, cfg, 3),
                        std::invalid_argument);
    };
    expect_throw([](auto& c) { c.initial_gamma = 0.0; }, "gamma");
    expect_throw([](auto& c) { c.batch_size = 0; }, "batch");
    expect_throw([](auto& c) { c.learning_rate = -0.1; }, "lr");
    expect_throw([](auto& c) { c.max_iterations = 0; }, "iters");
    expect_throw([](auto& c) { c.precision = 0.0; }, "precision");
    expect_throw([](auto& c) { c.precision = 2.0; }, "precision vs gamma");
    expect_throw([](auto& c) { c.gamma_floor = 0.0; }, "floor");
    expect_throw([](auto& c) { c.batch_size = 31; }, "batch > n");

    // Leave-one-out needs every class and complement to keep k samples.
    DecisionSystem tiny;
    tiny.features.resize(7, 1);
    tiny.features << 0, 1, 2, 3, 10, 11, 12;
    tiny.classes = {0, 0, 0, 0, 1, 1, 1};
    tiny.class_names = {"a", "b"};
    tiny.feature_names = {"f0"};
    GradientDescentConfig cfg;
    cfg.batch_size = 2;
    // Class 'a' passes its own count (4 >= k+1) but its complement holds
    // only 3 samples, one short of surviving leave-one-out at k = 3.
    CHECK_THROWS_WITH_AS(
        fit_gamma(tiny, KernelFamily::Gaussian, cfg, 3),
        "fit_gamma: class 'a' or its complement drops below k samples under leave-one-out",
        std::invalid_argument);
}

TEST_CASE("combo matches a hand-rolled brute force over the same folds") {
    const DecisionSystem train = synthetic_gaussians(48, 3, 1.5, 200);
    ComboConfig cfg;
    cfg.candidates = {"man", "euc", "che", "gauss:0.1"};
    cfg.inner_folds = 4;
    cfg.seed = 31;
    const int k = 3;
    const ComboResult result = combo_select(train, cfg, k);

    const FoldPlan plan = make_folds(train, cfg.inner_folds, cfg.seed);
    std::vector<double> expected(cfg.candidates.size(), 0.0);
    for (int f = 0; f < cfg.inner_folds; ++f) {
        DecisionSystem inner = subset(train, plan.train_indices(f));
        const DecisionSystem held = subset(train, plan.test_indices(f));
        const RangeNormalizer norm = fit_range_normalizer(inner);
        inner.features = apply_normalizer(norm, inner.features);
        const Eigen::MatrixXd test = apply_normalizer(norm, held.features);
        for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
            const FrnnModel model = fit(inner, build_named_relation(cfg.candidates[c], inner), k);
            std::vector<int> pred;
            for (Eigen::Index i = 0; i < test.rows(); ++i) {
                pred.push_back(model.predict(test.row(i).transpose()));
            }
            expected[c] += balanced_accuracy(held.classes, pred);
        }
    }
    int best = 0;
    for (std::size_t c = 0; c < expected.size(); ++c) {
        expected[c] /= cfg.inner_folds;
        if (expected[c] > expected[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }

    CHECK(result.winner_index == best);
    CHECK(result.winner == cfg.candidates[static_cast<std::size_t>(best)]);
    REQUIRE(result.scores.size() == expected.size());
    for (std::size_t c = 0; c < expected.size(); ++c) {
        CHECK(result.scores[c] == doctest::Approx(expected[c]).epsilon(1e-15));
    }
    REQUIRE(result.relation != nullptr);
    CHECK(result.relation->dimension() == train.n_features());

    // 48 samples, 4 folds, 4 candidates, all successful:
    // (folds-1) * m * n^2 / folds = 3 * 4 * 48^2 / 4 pair evaluations.
    CHECK(result.pair_evaluations == 3ULL * 4ULL * 48ULL * 48ULL / 4ULL);
}

TEST_CASE("a dominant candidate wins and a failing one scores minus infinity") {
    const DecisionSystem train = synthetic_gaussians(60, 2, 6.0, 55);
    ComboConfig cfg;
    // A vanishing-support Gaussian degenerates to the constant prediction;
    // Manhattan separates the two blobs essentially perfectly.
    cfg.candidates = {"gauss:1e-9", "man"};
    cfg.inner_folds = 3;
    cfg.seed = 2;
    const ComboResult result = combo_select(train, cfg, 3);
    CHECK(result.winner == "man");
    CHECK(result.winner_index == 1);
    CHECK(result.scores[1] > 0.9);

    // Duplicated features make every covariance singular: mah fails on each
    // fold while man keeps working.
    DecisionSystem degenerate = synthetic_gaussians(40, 2, 3.0, 7);
    degenerate.features.col(1) = degenerate.features.col(0);
    ComboConfig cfg2;
    cfg2.candidates = {"mah", "man"};
    cfg2.inner_folds = 3;
    cfg2.seed = 5;
    const ComboResult r2 = combo_select(degenerate, cfg2, 3);
    CHECK(r2.winner == "man");
    CHECK(r2.scores[0] == neg_inf);
    for (double s : r2.fold_scores[0]) CHECK(s == neg_inf);
    for (double s : r2.fold_scores[1]) CHECK(s > 0.5);
}

TEST_CASE("ties break toward the earlier candidate") {
    const DecisionSystem train = synthetic_gaussians(40, 2, 3.0, 21);
    ComboConfig cfg;
    cfg.candidates = {"euc", "euc", "man"};
    cfg.inner_folds = 3;
    cfg.seed = 9;
    const ComboResult result = combo_select(train, cfg, 3);
    CHECK(result.scores[0] == result.scores[1]);
    if (result.scores[0] >= result.scores[2]) {
        CHECK(result.winner_index == 0);
    } else {
        CHECK(result.winner_index == 2);
    }
}

TEST_CASE("combo error handling") {
    const DecisionSystem train = synthetic_gaussians(30, 2, 2.0, 3);
    ComboConfig cfg;
    cfg.candidates = {"man"};
    CHECK_THROWS_AS(combo_select(train, cfg, 3), std::invalid_argument);

    cfg.candidates = {"man", "euc"};
    cfg.inner_folds = 1;
    CHECK_THROWS_AS(combo_select(train, cfg, 3), std::invalid_argument);

    cfg.inner_folds = 3;
    cfg.candidates = {"man", "mystery"};
    CHECK_THROWS_WITH_AS(combo_select(train, cfg, 3),
                         "combo: unknown candidate relation 'mystery'", std::invalid_argument);

    // Every candidate undefined on every fold.
    DecisionSystem degenerate = synthetic_gaussians(40, 2, 3.0, 7);
    degenerate.features.col(1) = degenerate.features.col(0);
    ComboConfig cfg2;
    cfg2.candidates = {"mah", "csmbr"};
    cfg2.inner_folds = 3;
    cfg2.seed = 5;
    CHECK_THROWS_WITH_AS(combo_select(degenerate, cfg2, 3),
                         "combo: every candidate failed on every inner fold",
                         RelationUndefinedError);
}

TEST_CASE("combo is deterministic in the seed") {
    const DecisionSystem train = synthetic_gaussians(44, 2, 1.0, 71);
    ComboConfig cfg;
    cfg.candidates = {"man", "euc", "che"};
    cfg.inner_folds = 4;
    cfg.seed = 100;
    const ComboResult a = combo_select(train, cfg, 3);
    const ComboResult b = combo_select(train, cfg, 3);
    CHECK(a.winner == b.winner);
    CHECK(a.scores == b.scores);
    CHECK(a.pair_evaluations == b.pair_evaluations);
}

} // TEST_SUITE
