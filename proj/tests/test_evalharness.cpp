/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "fagc/evalharness.hpp"
#include "fagc/synthetic.hpp"
#include "support.hpp"

using namespace fagc;

namespace {

Regressor make(RegressorKind k) { return {k, {}, {}}; }

std::vector<LabeledSample> bench(std::uint64_t seed) {
    CurveBenchmarkOptions o;
    o.seed = seed;
    return make_curve_benchmark(o).samples;
}

HarnessOptions with_seed(std::uint64_t seed) {
    HarnessOptions h;
    h.seed = seed;
    return h;
}

} // namespace

TEST(Aggregate, MeansPerKeyAndSkipsUndefinedR2) {
    EvaluationReport rep;
    Metrics a{0.5, 1.0, 2.0, std::sqrt(2.0)};
    Metrics b{std::nullopt, 3.0, 4.0, 2.0};
    Metrics c{0.7, 2.0, 1.0, 1.0};
    rep.rows = {{"dt", "none", 0, 0, a}, {"dt", "none", 0, 1, b}, {"dt", "none", 0, 2, c},
                {"knn", "none", 0, 0, b}};
    const auto agg = aggregate(rep);
    ASSERT_EQ(agg.size(), 2u);
    EXPECT_EQ(agg[0].folds, 3u);
    EXPECT_EQ(agg[0].r2_folds, 2u);
    EXPECT_NEAR(*agg[0].r2, 0.6, 1e-15);
    EXPECT_NEAR(agg[0].mae, 2.0, 1e-15);
    EXPECT_NEAR(agg[0].mse, 7.0 / 3.0, 1e-15);
    EXPECT_FALSE(agg[1].r2);
    EXPECT_EQ(find_aggregate(agg, "knn", "none", 0), &agg[1]);
    EXPECT_EQ(find_aggregate(agg, "knn", "dt", 0), nullptr);
}

TEST(RunComparison, ConstantPredictorNeverBeatsZero) {
    const auto data = bench(1);
    Regressor mean_knn = make(RegressorKind::KNN);
    mean_knn.params.knn_k = data.size();  // averages every training label
    const auto rep = run_comparison(data, {mean_knn}, false, 0, make(RegressorKind::DecisionTree), with_seed(1));
    ASSERT_EQ(rep.rows.size(), kDefaultFolds);
    for (const auto& r : rep.rows) {
        ASSERT_TRUE(r.scores.r2);
        EXPECT_LE(*r.scores.r2, 1e-12);
        EXPECT_EQ(r.teacher, kNoTeacher);
        EXPECT_EQ(r.k_generated, 0u);
    }
}

TEST(RunComparison, RowInvariants) {
    const auto data = bench(2);
    std::vector<Regressor> all;
    for (auto k : kAllRegressorKinds) all.push_back(make(k));
    const auto rep = run_comparison(data, all, true, 40, make(RegressorKind::DecisionTree), with_seed(2));
    EXPECT_EQ(rep.rows.size(), all.size() * kDefaultFolds);
    EXPECT_EQ(rep.teacher_quality.size(), kDefaultFolds);
    for (const auto& r : rep.rows) {
        ASSERT_TRUE(r.scores.r2);
        EXPECT_LE(*r.scores.r2, 1.0);
        EXPECT_GE(r.scores.rmse, r.scores.mae);
        EXPECT_GE(r.scores.mae, 0.0);
        EXPECT_NEAR(r.scores.rmse * r.scores.rmse, r.scores.mse, 1e-9 * std::max(1.0, r.scores.mse));
    }
}

TEST(RunComparison, AuditsShowNoTestIdsInTraining) {
    const auto data = bench(3);
    for (auto protocol : {TeacherProtocol::OutOfFold, TeacherProtocol::InFold}) {
        HarnessOptions h = with_seed(3);
        h.protocol = protocol;
        const auto rep = run_comparison(data, {make(RegressorKind::Bagging)}, true, 20,
                                        make(RegressorKind::ExtraTree), h);
        ASSERT_EQ(rep.audits.size(), kDefaultFolds);
        std::set<std::string> all_test;
        for (const auto& a : rep.audits) {
            const std::set<std::string> test(a.test_ids.begin(), a.test_ids.end());
            EXPECT_EQ(test.size(), 3u);
            for (const auto* ids : {&a.teacher_ids, &a.augmentation_ids, &a.student_ids}) {
                EXPECT_EQ(ids->size(), 15u);
                for (const auto& id : *ids) EXPECT_FALSE(test.count(id)) << id;
            }
            all_test.insert(test.begin(), test.end());
        }
        EXPECT_EQ(all_test.size(), data.size());
    }
}

TEST(RunComparison, AuditRaisesOnLeak) {
    FoldAudit a;
    a.fold = 2;
    a.test_ids = {"s1", "s2"};
    a.teacher_ids = {"s0", "s3"};
    a.augmentation_ids = {"s0", "s2"};
    try {
        detail::audit_fold(a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LeakageDetected);
    }
    a.augmentation_ids = {"s0", "s3"};
    EXPECT_NO_THROW(detail::audit_fold(a));
}

TEST(RunComparison, RejectsBadInputs) {
    auto data = bench(4);
    const auto dt = make(RegressorKind::DecisionTree);
    EXPECT_THROW(run_comparison(data, {dt}, true, 0, dt), Error);
    EXPECT_THROW(run_comparison(data, {}, false, 0, dt), Error);
    EXPECT_THROW(run_comparison({}, {dt}, false, 0, dt), Error);
    data[1].features.id = data[0].features.id;
    try {
        run_comparison(data, {dt}, false, 0, dt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
    }
}

TEST(RunComparison, DeterministicUnderSeed) {
    const auto data = bench(5);
    const auto et = make(RegressorKind::ExtraTree);
    const auto a = aggregate(run_comparison(data, {et}, true, 30, et, with_seed(5)));
    const auto b = aggregate(run_comparison(data, {et}, true, 30, et, with_seed(5)));
    EXPECT_EQ(*a[0].r2, *b[0].r2);
    EXPECT_EQ(a[0].rmse, b[0].rmse);
}

TEST(RunKSweep, CardinalityAndSingletonReduction) {
    const auto data = bench(6);
    const std::vector<Regressor> models{make(RegressorKind::DecisionTree), make(RegressorKind::KNN)};
    const auto dt = make(RegressorKind::DecisionTree);
    const std::vector<std::size_t> ks{10, 20, 40};
    const auto rep = run_k_sweep(data, models, ks, dt, with_seed(6));
    EXPECT_EQ(rep.rows.size(), ks.size() * models.size() * kDefaultFolds);
    EXPECT_EQ(aggregate(rep).size(), ks.size() * models.size());

    const auto single = run_k_sweep(data, models, {10}, dt, with_seed(6));
    const auto direct = run_comparison(data, models, true, 10, dt, with_seed(6));
    ASSERT_EQ(single.rows.size(), direct.rows.size());
    for (std::size_t i = 0; i < single.rows.size(); ++i) {
        EXPECT_EQ(single.rows[i].scores.mse, direct.rows[i].scores.mse);
    }
    EXPECT_THROW(run_k_sweep(data, models, {10, 0}, dt), Error);
    EXPECT_EQ(kDefaultSweep, (std::vector<std::size_t>{10, 20, 40, 100, 200, 400, 1000}));
}

TEST(RunTeacherGrid, BaselineAndSingleCellReduction) {
    const auto data = bench(7);
    const auto dt = make(RegressorKind::DecisionTree);
    const auto bag = make(RegressorKind::Bagging);
    const auto grid = run_teacher_grid(data, {dt}, {bag}, 40, with_seed(7));
    const auto base = run_comparison(data, {bag}, false, 0, dt, with_seed(7));
    const auto fagc = run_comparison(data, {bag}, true, 40, dt, with_seed(7));
    ASSERT_EQ(grid.rows.size(), base.rows.size() + fagc.rows.size());
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
        EXPECT_EQ(grid.rows[i].teacher, kNoTeacher);
        EXPECT_EQ(grid.rows[i].scores.mse, base.rows[i].scores.mse);
        EXPECT_EQ(grid.rows[base.rows.size() + i].scores.mse, fagc.rows[i].scores.mse);
    }

    std::vector<Regressor> teachers, students;
    for (auto k : kAllRegressorKinds) {
        teachers.push_back(make(k));
        students.push_back(make(k));
    }
    const auto full = aggregate(run_teacher_grid(data, teachers, students, 20, with_seed(7)));
    EXPECT_EQ(full.size(), students.size() * (teachers.size() + 1));
    EXPECT_THROW(run_teacher_grid(data, {}, {bag}, 20), Error);
}

// Within one teacher family, a teacher with lower out-of-fold RMSE gives a
// student R^2 at least as high, averaged over ten benchmark seeds.
TEST(RunTeacherGrid, BetterTeacherNoWorseWithinFamily) {
    const auto student = make(RegressorKind::DecisionTree);
    std::vector<std::vector<Regressor>> families(2);
    for (std::size_t depth : {1, 2, 3, 0}) {
        Regressor r = make(RegressorKind::DecisionTree);
        r.params.max_depth = depth;
        r.name = "dt-depth" + std::to_string(depth);
        families[0].push_back(r);
    }
    for (std::size_t k : {3, 6, 9, 12}) {
        Regressor r = make(RegressorKind::KNN);
        r.params.knn_k = k;
        r.name = "knn-" + std::to_string(k);
        families[1].push_back(r);
    }
    for (const auto& family : families) {
        std::vector<std::pair<double, double>> quality_and_r2;  // (teacher rmse, student r2)
        for (const auto& teacher : family) {
            double rmse = 0.0, r2 = 0.0;
            std::size_t q = 0;
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const auto rep = run_comparison(bench(seed), {student}, true, 100, teacher, with_seed(seed));
                for (const auto& t : rep.teacher_quality) {
                    rmse += t.scores.rmse;
                    ++q;
                }
                r2 += *aggregate(rep).front().r2;
            }
            quality_and_r2.emplace_back(rmse / static_cast<double>(q), r2 / 10.0);
        }
        std::sort(quality_and_r2.begin(), quality_and_r2.end());
        for (std::size_t i = 0; i + 1 < quality_and_r2.size(); ++i) {
            EXPECT_GE(quality_and_r2[i].second, quality_and_r2[i + 1].second)
                << "teacher rmse " << quality_and_r2[i].first << " vs " << quality_and_r2[i + 1].first;
        }
    }
}
