/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief Serialisation of evaluation reports.
 *
 *  CSV: one row per (model, teacher, K, fold), fixed header, undefined R^2
 *  written as "nan". JSON: metadata, per-fold rows, aggregate block,
 *  teacher quality and the per-fold id audit.
 */

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fagc/analysis.hpp"
#include "fagc/evalharness.hpp"

namespace fagc {

inline constexpr std::string_view kReportCsvHeader = "experiment_id,model,teacher,k_generated,fold,r2,mae,mse,rmse";

namespace detail {

inline std::string format_optional(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string("nan");
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json metrics_json(const Metrics& m) {
    return {{"r2", optional_json(m.r2)}, {"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}};
}

} // namespace detail

inline std::string report_csv(const EvaluationReport& report) {
    std::string out(kReportCsvHeader);
    out += '\n';
    for (const auto& r : report.rows) {
        out += report.experiment_id + ',' + r.model + ',' + r.teacher + ',' + std::to_string(r.k_generated) + ',' +
               std::to_string(r.fold) + ',' + detail::format_optional(r.scores.r2) + ',' +
               detail::format_real(r.scores.mae) + ',' + detail::format_real(r.scores.mse) + ',' +
               detail::format_real(r.scores.rmse) + '\n';
    }
    return out;
}

/// Aggregate rows in the same column layout; the fold column holds the
/// number of folds averaged.
inline std::string aggregate_csv(const std::string& experiment_id, const std::vector<AggregateRow>& rows) {
    std::string out = "experiment_id,model,teacher,k_generated,folds,r2,mae,mse,rmse\n";
    for (const auto& r : rows) {
        out += experiment_id + ',' + r.model + ',' + r.teacher + ',' + std::to_string(r.k_generated) + ',' +
               std::to_string(r.folds) + ',' + detail::format_optional(r.r2) + ',' + detail::format_real(r.mae) +
               ',' + detail::format_real(r.mse) + ',' + detail::format_real(r.rmse) + '\n';
    }
    return out;
}

inline nlohmann::json report_json(const EvaluationReport& report, const nlohmann::json& extra_metadata = {}) {
    using nlohmann::json;
    json meta = {{"experiment_id", report.experiment_id}, {"seed", report.seed}, {"k_folds", report.k_folds}};
    if (extra_metadata.is_object()) {
        for (auto it = extra_metadata.begin(); it != extra_metadata.end(); ++it) meta[it.key()] = it.value();
    }

    json rows = json::array();
    for (const auto& r : report.rows) {
        json row = {{"model", r.model}, {"teacher", r.teacher}, {"k_generated", r.k_generated}, {"fold", r.fold}};
        row.update(detail::metrics_json(r.scores));
        rows.push_back(std::move(row));
    }

    json agg = json::array();
    for (const auto& a : aggregate(report)) {
        agg.push_back({{"model", a.model},
                       {"teacher", a.teacher},
                       {"k_generated", a.k_generated},
                       {"folds", a.folds},
                       {"r2_folds", a.r2_folds},
                       {"r2", detail::optional_json(a.r2)},
                       {"mae", a.mae},
                       {"mse", a.mse},
                       {"rmse", a.rmse}});
    }

    json quality = json::array();
    for (const auto& q : report.teacher_quality) {
        json row = {{"teacher", q.teacher}, {"k_generated", q.k_generated}, {"fold", q.fold}};
        row.update(detail::metrics_json(q.scores));
        quality.push_back(std::move(row));
    }

    json audits = json::array();
    for (const auto& a : report.audits) {
        audits.push_back({{"teacher", a.teacher},
                          {"k_generated", a.k_generated},
                          {"fold", a.fold},
                          {"test_ids", a.test_ids},
                          {"teacher_ids", a.teacher_ids},
                          {"augmentation_ids", a.augmentation_ids},
                          {"student_ids", a.student_ids}});
    }

    return {{"metadata", meta}, {"rows", rows}, {"aggregate", agg}, {"teacher_quality", quality}, {"audits", audits}};
}

} // namespace fagc
