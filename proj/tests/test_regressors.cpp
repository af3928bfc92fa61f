/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "fagc/metrics.hpp"
#include "fagc/regressors.hpp"
#include "support.hpp"

using namespace fagc;

namespace {

Regressor spec(RegressorKind k, std::uint64_t seed = 0) {
    Regressor r{k, {}, {}};
    r.params.seed = seed;
    return r;
}

} // namespace

TEST(DecisionTree, TwoPointsGivePureLeaves) {
    const Matrix x{{0.0}, {1.0}};
    const std::vector<double> y{0.0, 1.0};
    const auto m = fit(spec(RegressorKind::DecisionTree), x, y);
    EXPECT_EQ(m.predict(x), y);
    EXPECT_EQ(m.predict_one(std::vector<double>{0.9}), 1.0);
    const auto& tree = std::get<TreeModel>(m.state());
    EXPECT_EQ(tree.nodes.front().threshold, 0.5);
}

TEST(DecisionTree, SplitsMatchBruteForceOnEveryGridDataset1D) {
    testkit::Grid g{{{0}, {1}, {2}, {3}}, {0, 1, 2}};
    std::size_t count = 0, bad = 0;
    testkit::for_each_dataset(g, 6, [&](const Matrix& x, const std::vector<double>& y) {
        const auto m = fit(spec(RegressorKind::DecisionTree), x, y);
        bad += testkit::check_tree(std::get<TreeModel>(m.state()), x, y);
        ++count;
    });
    EXPECT_GT(count, 10000u);
    EXPECT_EQ(bad, 0u);
}

TEST(DecisionTree, SplitsMatchBruteForceOnEveryGridDataset2D) {
    testkit::Grid g{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 2}};
    std::size_t bad = 0;
    testkit::for_each_dataset(g, 6, [&](const Matrix& x, const std::vector<double>& y) {
        bad += testkit::check_tree(std::get<TreeModel>(fit(spec(RegressorKind::DecisionTree), x, y).state()), x, y);
    });
    EXPECT_EQ(bad, 0u);
}

TEST(DecisionTree, UnboundedDepthFitsDistinctInputs) {
    Rng rng(30);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x;
        std::vector<double> y;
        for (int i = 0; i < 25; ++i) {
            x.push_back(testkit::random_vector(rng, 5));
            y.push_back(standard_normal(rng));
        }
        const auto m = fit(spec(RegressorKind::DecisionTree), x, y);
        EXPECT_EQ(r2_score(y, m.predict(x)), 1.0);
    }
}

TEST(DecisionTree, DepthLimitIsHonoured) {
    Rng rng(31);
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(testkit::random_vector(rng, 3));
        y.push_back(standard_normal(rng));
    }
    auto s = spec(RegressorKind::DecisionTree);
    s.params.max_depth = 2;
    EXPECT_LE(std::get<TreeModel>(fit(s, x, y).state()).depth(), 2u);
}

TEST(ExtraTree, FitsDistinctInputsAndIsSeeded) {
    Rng rng(32);
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(testkit::random_vector(rng, 4));
        y.push_back(standard_normal(rng));
    }
    const auto a = fit(spec(RegressorKind::ExtraTree, 1), x, y);
    const auto b = fit(spec(RegressorKind::ExtraTree, 1), x, y);
    const auto c = fit(spec(RegressorKind::ExtraTree, 2), x, y);
    EXPECT_EQ(r2_score(y, a.predict(x)), 1.0);
    const Matrix probe{testkit::random_vector(rng, 4), testkit::random_vector(rng, 4), testkit::random_vector(rng, 4)};
    EXPECT_EQ(a.predict(probe), b.predict(probe));
    EXPECT_NE(std::get<TreeModel>(a.state()).nodes.front().threshold,
              std::get<TreeModel>(c.state()).nodes.front().threshold);
}

TEST(Linear, TwoPointsDetermineLine) {
    const Matrix x{{0.0}, {1.0}};
    const std::vector<double> y{1.0, 3.0};
    const auto m = fit(spec(RegressorKind::Linear), x, y);
    const auto& lm = std::get<LinearModel>(m.state());
    EXPECT_NEAR(lm.weights.front(), 2.0, 1e-12);
    EXPECT_NEAR(lm.bias, 1.0, 1e-12);
    EXPECT_NEAR(m.predict_one(std::vector<double>{2.0}), 5.0, 1e-12);
}

TEST(Linear, RecoversExactPlane) {
    Rng rng(33);
    const std::vector<double> w{1.5, -2.0, 0.25};
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(testkit::random_vector(rng, 3));
        y.push_back(4.0 + detail::dot(w, x.back()));
    }
    const auto lm = std::get<LinearModel>(fit(spec(RegressorKind::Linear), x, y).state());
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(lm.weights[j], w[j], 1e-10);
    EXPECT_NEAR(lm.bias, 4.0, 1e-10);
}

TEST(Linear, WideDesignInterpolatesTrainingData) {
    Rng rng(34);
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
        x.push_back(testkit::random_vector(rng, 200));
        y.push_back(standard_normal(rng));
    }
    const auto m = fit(spec(RegressorKind::Linear), x, y);
    const auto p = m.predict(x);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(p[i], y[i], 1e-6);
}

TEST(Linear, ConstantFeaturesPredictMean) {
    const Matrix x{{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
    const std::vector<double> y{1.0, 2.0, 6.0};
    const auto m = fit(spec(RegressorKind::Linear), x, y);
    EXPECT_NEAR(m.predict_one(x.front()), 3.0, 1e-9);
}

TEST(Knn, OneNeighbourReproducesLabels) {
    Rng rng(35);
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(testkit::random_vector(rng, 6));
        y.push_back(standard_normal(rng));
    }
    auto s = spec(RegressorKind::KNN);
    s.params.knn_k = 1;
    EXPECT_EQ(fit(s, x, y).predict(x), y);
}

TEST(Knn, AveragesNearestAndBreaksTiesByIndex) {
    const Matrix x{{0.0}, {1.0}, {-1.0}, {5.0}};
    const std::vector<double> y{10.0, 20.0, 30.0, 40.0};
    auto s = spec(RegressorKind::KNN);
    s.params.knn_k = 2;
    // 1 and -1 are equally far from 0; index 1 wins the tie.
    EXPECT_EQ(fit(s, x, y).predict_one(std::vector<double>{0.0}), 15.0);
    s.params.knn_k = 10;
    EXPECT_EQ(fit(s, x, y).predict_one(std::vector<double>{0.0}), 25.0);
    s.params.knn_k = 0;
    EXPECT_THROW(fit(s, x, y), Error);
}

TEST(Ensembles, PredictionsStayInTrainingRange) {
    Rng rng(36);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix x;
        std::vector<double> y;
        for (int i = 0; i < 15; ++i) {
            x.push_back(testkit::random_vector(rng, 4));
            y.push_back(50.0 + 10.0 * standard_normal(rng));
        }
        const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
        for (auto kind : {RegressorKind::Bagging, RegressorKind::AdaBoostR2, RegressorKind::DecisionTree,
                          RegressorKind::ExtraTree}) {
            const auto m = fit(spec(kind, trial), x, y);
            for (int k = 0; k < 50; ++k) {
                const double p = m.predict_one(testkit::random_vector(rng, 4, 3.0));
                EXPECT_GE(p, *lo);
                EXPECT_LE(p, *hi);
            }
        }
    }
}

TEST(Ensembles, StructureAndDeterminism) {
    Rng rng(37);
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(testkit::random_vector(rng, 3));
        y.push_back(x.back()[0] * 2.0 + 0.1 * standard_normal(rng));
    }
    const auto bag = fit(spec(RegressorKind::Bagging, 5), x, y);
    EXPECT_EQ(std::get<BaggingModel>(bag.state()).trees.size(), 10u);
    const auto ada = fit(spec(RegressorKind::AdaBoostR2, 5), x, y);
    const auto& am = std::get<AdaBoostModel>(ada.state());
    EXPECT_GE(am.trees.size(), 1u);
    EXPECT_LE(am.trees.size(), 50u);
    EXPECT_EQ(am.trees.size(), am.estimator_weights.size());
    for (const auto& t : am.trees) EXPECT_LE(t.depth(), 3u);
    EXPECT_EQ(ada.predict(x), fit(spec(RegressorKind::AdaBoostR2, 5), x, y).predict(x));
    EXPECT_EQ(bag.predict(x), fit(spec(RegressorKind::Bagging, 5), x, y).predict(x));
}

TEST(FittedRegressor, RejectsPredictBeforeFitAndWrongWidth) {
    FittedRegressor empty;
    try {
        empty.predict_one(std::vector<double>{1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFitted);
    }
    const auto m = fit(spec(RegressorKind::Linear), Matrix{{0.0, 1.0}, {1.0, 0.0}}, std::vector<double>{1, 2});
    EXPECT_THROW(m.predict_one(std::vector<double>{1.0}), Error);
}

TEST(FittedRegressor, RejectsBadTrainingData) {
    const auto s = spec(RegressorKind::DecisionTree);
    EXPECT_THROW(fit(s, Matrix{}, std::vector<double>{}), Error);
    EXPECT_THROW(fit(s, Matrix{{1.0}, {2.0}}, std::vector<double>{1.0}), Error);
    EXPECT_THROW(fit(s, Matrix{{1.0}, {2.0, 3.0}}, std::vector<double>{1.0, 2.0}), Error);
    EXPECT_THROW(fit(s, Matrix{{1.0}, {NAN}}, std::vector<double>{1.0, 2.0}), Error);
}

TEST(FittedRegressor, FromLinearHead) {
    const auto m = FittedRegressor::from_linear({0.0, 0.0, 0.0}, 5.0);
    EXPECT_EQ(m.kind(), RegressorKind::Linear);
    EXPECT_EQ(m.predict_one(std::vector<double>{1, 2, 3}), 5.0);
}

TEST(RegressorKind, NamesRoundTrip) {
    for (auto k : kAllRegressorKinds) EXPECT_EQ(parse_regressor_kind(to_string(k)), k);
    EXPECT_EQ(parse_regressor_kind("adaboostr2"), RegressorKind::AdaBoostR2);
    EXPECT_THROW(parse_regressor_kind("svm"), Error);
}
