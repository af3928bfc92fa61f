/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief Cross-validated experiments: regressor comparison, sweeps over the
 *  number of generated features, and teacher x student grids.
 *
 *  Every fold starts from the raw training split. Augmentation and teacher
 *  fitting only ever see that split; test features are pre-shape normalised
 *  the same way as training features and scored once. Each fold records
 *  an id audit, and the harness raises LeakageDetected if a test id ever
 *  reaches a teacher, the geodesic fit or a student.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fagc/augment.hpp"
#include "fagc/error.hpp"
#include "fagc/metrics.hpp"
#include "fagc/regressors.hpp"

namespace fagc {

inline const std::vector<std::size_t> kDefaultSweep = {10, 20, 40, 100, 200, 400, 1000};
inline constexpr std::size_t kDefaultFolds = 6;
inline constexpr std::string_view kNoTeacher = "none";

struct ReportRow {
    std::string model;
    std::string teacher;  // kNoTeacher when no augmentation was applied
    std::size_t k_generated = 0;
    std::size_t fold = 0;
    Metrics scores;
};

struct AggregateRow {
    std::string model;
    std::string teacher;
    std::size_t k_generated = 0;
    std::size_t folds = 0;
    std::size_t r2_folds = 0;  // folds with a defined R^2
    std::optional<double> r2;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

struct TeacherQualityRow {
    std::string teacher;
    std::size_t k_generated = 0;
    std::size_t fold = 0;
    Metrics scores;
};

struct FoldAudit {
    std::string teacher;
    std::size_t k_generated = 0;
    std::size_t fold = 0;
    std::vector<std::string> test_ids;
    std::vector<std::string> teacher_ids;
    std::vector<std::string> augmentation_ids;
    std::vector<std::string> student_ids;
};

struct EvaluationReport {
    std::string experiment_id;
    std::uint64_t seed = 0;
    std::size_t k_folds = kDefaultFolds;
    std::vector<ReportRow> rows;
    std::vector<TeacherQualityRow> teacher_quality;
    std::vector<FoldAudit> audits;

    void append(EvaluationReport&& other) {
        for (auto& r : other.rows) rows.push_back(std::move(r));
        for (auto& r : other.teacher_quality) teacher_quality.push_back(std::move(r));
        for (auto& r : other.audits) audits.push_back(std::move(r));
    }
};

struct HarnessOptions {
    std::string experiment_id = "experiment";
    std::size_t k_folds = kDefaultFolds;
    std::uint64_t seed = 0;
    TeacherProtocol protocol = TeacherProtocol::OutOfFold;
    std::size_t teacher_folds = 5;
};

/// Mean of per-fold metrics per (model, teacher, K), in first-seen order.
/// Folds with undefined R^2 are left out of the R^2 mean only.
inline std::vector<AggregateRow> aggregate(const EvaluationReport& report) {
    std::vector<AggregateRow> out;
    std::map<std::tuple<std::string, std::string, std::size_t>, std::size_t> index;
    std::vector<double> r2_sum;
    for (const auto& row : report.rows) {
        const auto key = std::make_tuple(row.model, row.teacher, row.k_generated);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            AggregateRow fresh;
            fresh.model = row.model;
            fresh.teacher = row.teacher;
            fresh.k_generated = row.k_generated;
            out.push_back(std::move(fresh));
            r2_sum.push_back(0.0);
        }
        AggregateRow& agg = out[it->second];
        agg.folds += 1;
        agg.mae += row.scores.mae;
        agg.mse += row.scores.mse;
        agg.rmse += row.scores.rmse;
        if (row.scores.r2) {
            agg.r2_folds += 1;
            r2_sum[it->second] += *row.scores.r2;
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& agg = out[i];
        const double n = static_cast<double>(agg.folds);
        agg.mae /= n;
        agg.mse /= n;
        agg.rmse /= n;
        if (agg.r2_folds > 0) agg.r2 = r2_sum[i] / static_cast<double>(agg.r2_folds);
    }
    return out;
}

inline const AggregateRow* find_aggregate(const std::vector<AggregateRow>& rows, std::string_view model,
                                          std::string_view teacher, std::size_t k_generated) {
    for (const auto& r : rows) {
        if (r.model == model && r.teacher == teacher && r.k_generated == k_generated) return &r;
    }
    return nullptr;
}

namespace detail {

inline void require_unique_ids(const std::vector<LabeledSample>& data) {
    std::set<std::string> seen;
    for (const auto& s : data) {
        if (!seen.insert(s.features.id).second) {
            throw Error(ErrorCode::DuplicateId, "duplicate sample id '" + s.features.id + "'");
        }
    }
}

inline void audit_fold(const FoldAudit& audit) {
    const std::set<std::string> test(audit.test_ids.begin(), audit.test_ids.end());
    for (const auto* ids : {&audit.teacher_ids, &audit.augmentation_ids, &audit.student_ids}) {
        for (const auto& id : *ids) {
            if (test.count(id)) {
                throw Error(ErrorCode::LeakageDetected,
                            "test sample '" + id + "' reached training in fold " +
                                std::to_string(audit.fold));
            }
        }
    }
}

/// One pass over all folds. With a teacher, each fold's training split is
/// augmented once and shared by every student.
inline EvaluationReport run_folds(const std::vector<LabeledSample>& data,
                                  const std::vector<Regressor>& students,
                                  const std::optional<Regressor>& teacher, std::size_t count,
                                  const HarnessOptions& options) {
    if (data.empty()) throw Error(ErrorCode::EmptyTrainingSet, "dataset is empty");
    if (students.empty()) throw Error(ErrorCode::ParamOutOfRange, "no student models given");
    if (teacher && count == 0) {
        throw Error(ErrorCode::ParamOutOfRange, "generated feature count must be positive");
    }
    require_unique_ids(data);

    EvaluationReport report;
    report.experiment_id = options.experiment_id;
    report.seed = options.seed;
    report.k_folds = options.k_folds;

    const std::string teacher_name = teacher ? display_name(*teacher) : std::string(kNoTeacher);
    const std::size_t k_generated = teacher ? count : 0;
    const auto folds = kfold_split(data.size(), options.k_folds, options.seed);

    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<LabeledSample> train;
        for (auto i : folds[f].train) train.push_back(data[i]);

        FoldAudit audit;
        audit.teacher = teacher_name;
        audit.k_generated = k_generated;
        audit.fold = f;

        Matrix test_x;
        std::vector<double> test_y;
        for (auto i : folds[f].test) {
            test_x.push_back(normalize_feature(data[i].features).values);
            test_y.push_back(data[i].label);
            audit.test_ids.push_back(data[i].features.id);
        }

        Matrix train_x;
        std::vector<double> train_y;
        if (teacher) {
            const AugmentedDataset aug =
                build_augmented(train, count, *teacher,
                                {options.protocol, options.teacher_folds, derive_seed(options.seed, f)});
            audit.teacher_ids = aug.teacher_training_ids;
            audit.augmentation_ids = aug.augmentation_input_ids;
            for (const auto& s : aug.originals) audit.student_ids.push_back(s.features.id);
            train_x = aug.features();
            train_y = aug.labels();
            report.teacher_quality.push_back({teacher_name, k_generated, f, aug.teacher_quality});
        } else {
            for (const auto& s : train) {
                train_x.push_back(normalize_feature(s.features).values);
                train_y.push_back(s.label);
                audit.student_ids.push_back(s.features.id);
            }
        }
        audit_fold(audit);

        for (const auto& student : students) {
            const FittedRegressor model = fit(student, train_x, train_y);
            report.rows.push_back({display_name(student), teacher_name, k_generated, f,
                                   metrics(test_y, model.predict(test_x))});
        }
        report.audits.push_back(std::move(audit));
    }
    return report;
}

} // namespace detail

/// Cross-validated scores of each model, with or without augmentation.
inline EvaluationReport run_comparison(const std::vector<LabeledSample>& data,
                                       const std::vector<Regressor>& models, bool use_fagc,
                                       std::size_t count, const Regressor& teacher,
                                       const HarnessOptions& options = {}) {
    return detail::run_folds(data, models, use_fagc ? std::optional<Regressor>(teacher) : std::nullopt,
                             count, options);
}

inline EvaluationReport run_k_sweep(const std::vector<LabeledSample>& data,
                                    const std::vector<Regressor>& models,
                                    const std::vector<std::size_t>& counts, const Regressor& teacher,
                                    const HarnessOptions& options = {}) {
    for (auto k : counts) {
        if (k == 0) throw Error(ErrorCode::ParamOutOfRange, "sweep values must be positive");
    }
    EvaluationReport report;
    report.experiment_id = options.experiment_id;
    report.seed = options.seed;
    report.k_folds = options.k_folds;
    for (auto k : counts) report.append(run_comparison(data, models, true, k, teacher, options));
    return report;
}

/// Every (teacher, student) pair plus a no-augmentation baseline per student.
inline EvaluationReport run_teacher_grid(const std::vector<LabeledSample>& data,
                                         const std::vector<Regressor>& teachers,
                                         const std::vector<Regressor>& students, std::size_t count,
                                         const HarnessOptions& options = {}) {
    if (teachers.empty()) throw Error(ErrorCode::ParamOutOfRange, "no teacher models given");
    EvaluationReport report = detail::run_folds(data, students, std::nullopt, 0, options);
    for (const auto& t : teachers) report.append(detail::run_folds(data, students, t, count, options));
    return report;
}

} // namespace fagc
