/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief Feature augmentation along a fitted geodesic, with pseudo-labels.
 *
 *  Pipeline: project every training feature onto the pre-shape sphere, fit
 *  one geodesic segment to the cloud, sample K points along it, map them
 *  back to D dimensions and label them with a teacher regressor fitted on
 *  the (normalised) training features. The result holds the originals in
 *  the same normalised coordinates as the generated points, so students
 *  see one feature domain.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fagc/error.hpp"
#include "fagc/geodesic.hpp"
#include "fagc/metrics.hpp"
#include "fagc/preshape.hpp"
#include "fagc/regressors.hpp"

namespace fagc {

struct LabeledSample {
    FeatureVector features;
    double label = 0.0;
};

enum class TeacherProtocol { InFold, OutOfFold };

struct AugmentOptions {
    TeacherProtocol protocol = TeacherProtocol::OutOfFold;
    /// Inner folds of the training split used by the out-of-fold protocol.
    std::size_t teacher_folds = 5;
    std::uint64_t seed = 0;
};

struct AugmentedDataset {
    std::vector<LabeledSample> originals;
    std::vector<LabeledSample> generated;
    RegressorKind teacher_kind = RegressorKind::DecisionTree;
    TeacherProtocol protocol = TeacherProtocol::OutOfFold;

    /// Ids of the two training samples chosen as geodesic endpoints.
    std::string endpoint_first;
    std::string endpoint_second;
    double theta = 0.0;
    double fit_cost = 0.0;

    /// Teacher scores: out-of-fold predictions within the training split, or
    /// in-sample predictions under the in-fold protocol.
    Metrics teacher_quality;

    /// Every id the teacher was fitted on, and every id fed to the geodesic fit.
    std::vector<std::string> teacher_training_ids;
    std::vector<std::string> augmentation_input_ids;

    std::size_t original_count() const noexcept { return originals.size(); }
    std::size_t generated_count() const noexcept { return generated.size(); }
    std::size_t size() const noexcept { return originals.size() + generated.size(); }

    Matrix features() const {
        Matrix x;
        x.reserve(size());
        for (const auto& s : originals) x.push_back(s.features.values);
        for (const auto& s : generated) x.push_back(s.features.values);
        return x;
    }

    std::vector<double> labels() const {
        std::vector<double> y;
        y.reserve(size());
        for (const auto& s : originals) y.push_back(s.label);
        for (const auto& s : generated) y.push_back(s.label);
        return y;
    }
};

/// Teacher predictions for generated pre-shape points, read in D dimensions.
inline std::vector<double> pseudo_label(const FittedRegressor& teacher,
                                        const std::vector<PreShapePoint>& generated) {
    if (!teacher.fitted()) throw Error(ErrorCode::NotFitted, "teacher is not fitted");
    std::vector<double> out;
    out.reserve(generated.size());
    for (const auto& g : generated) {
        const double y = teacher.predict_one(unproject(g).values);
        if (!std::isfinite(y)) throw Error(ErrorCode::NonFinite, "teacher produced a non-finite label");
        out.push_back(y);
    }
    return out;
}

inline std::string generated_id(std::size_t k) { return "gen-" + std::to_string(k); }

namespace detail {

/// Projection, geodesic fit and sampling; fills everything except the teacher
/// fields and the generated labels.
inline AugmentedDataset augment_geometry(const std::vector<LabeledSample>& train, std::size_t count,
                                         std::vector<PreShapePoint>& samples) {
    if (count == 0) throw Error(ErrorCode::ParamOutOfRange, "generated feature count must be positive");
    if (train.size() < 2) {
        throw Error(ErrorCode::InsufficientPoints, "augmentation needs at least two training samples");
    }

    AugmentedDataset out;
    std::vector<PreShapePoint> points;
    points.reserve(train.size());
    for (const auto& s : train) {
        if (!std::isfinite(s.label)) throw Error(ErrorCode::NonFinite, "training label is not finite");
        points.push_back(project(s.features));
        out.originals.push_back({unproject(points.back()), s.label});
        out.augmentation_input_ids.push_back(s.features.id);
    }

    const GeodesicFit geo = fit_geodesic_indexed(points);
    out.endpoint_first = train[geo.first].features.id;
    out.endpoint_second = train[geo.second].features.id;
    out.theta = geo.segment.theta();
    out.fit_cost = geo.cost;
    samples = sample_uniform(geo.segment, count);
    return out;
}

inline void attach_generated(AugmentedDataset& out, const std::vector<PreShapePoint>& samples,
                             const std::vector<double>& labels) {
    out.generated.reserve(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        FeatureVector v = unproject(samples[k]);
        v.id = generated_id(k);
        out.generated.push_back({std::move(v), labels[k]});
    }
}

} // namespace detail

/// Pseudo-labels from a fixed function of the D-dimensional normalised
/// feature instead of a fitted teacher. Nothing is trained, so the teacher
/// id list stays empty and teacher_quality scores the originals.
using PseudoLabeler = std::function<double(std::span<const double>)>;

inline AugmentedDataset augment_with_labeler(const std::vector<LabeledSample>& train, std::size_t count,
                                             const PseudoLabeler& labeler) {
    std::vector<PreShapePoint> samples;
    AugmentedDataset out = detail::augment_geometry(train, count, samples);
    out.protocol = TeacherProtocol::InFold;
    std::vector<double> fitted, truth, labels;
    for (const auto& s : out.originals) {
        fitted.push_back(labeler(s.features.values));
        truth.push_back(s.label);
    }
    out.teacher_quality = metrics(truth, fitted);
    for (const auto& g : samples) {
        const double y = labeler(unproject(g).values);
        if (!std::isfinite(y)) throw Error(ErrorCode::NonFinite, "labeler produced a non-finite label");
        labels.push_back(y);
    }
    detail::attach_generated(out, samples, labels);
    return out;
}

inline AugmentedDataset build_augmented(const std::vector<LabeledSample>& train, std::size_t count,
                                        const Regressor& teacher, const AugmentOptions& options = {}) {
    std::vector<PreShapePoint> samples;
    AugmentedDataset out = detail::augment_geometry(train, count, samples);
    out.teacher_kind = teacher.kind;
    out.protocol = options.protocol;

    Matrix x;
    std::vector<double> y;
    for (const auto& s : out.originals) {
        x.push_back(s.features.values);
        y.push_back(s.label);
        out.teacher_training_ids.push_back(s.features.id);
    }
    std::vector<double> labels;

    if (options.protocol == TeacherProtocol::OutOfFold) {
        // Cross-fitting: each inner teacher sees k-1 inner folds, scores the
        // held-out fold, and the pseudo-label is the mean over inner teachers.
        const std::size_t k = std::clamp<std::size_t>(options.teacher_folds, 2, x.size());
        std::vector<double> oof(x.size());
        labels.assign(count, 0.0);
        const auto inner_folds = kfold_split(x.size(), k, options.seed);
        for (const auto& fold : inner_folds) {
            Matrix fx;
            std::vector<double> fy;
            for (auto i : fold.train) {
                fx.push_back(x[i]);
                fy.push_back(y[i]);
            }
            const FittedRegressor inner = fit(teacher, fx, fy);
            for (auto i : fold.test) oof[i] = inner.predict_one(x[i]);
            const std::vector<double> part = pseudo_label(inner, samples);
            for (std::size_t j = 0; j < count; ++j) labels[j] += part[j];
        }
        for (auto& l : labels) l /= static_cast<double>(inner_folds.size());
        out.teacher_quality = metrics(y, oof);
    } else {
        const FittedRegressor fitted_teacher = fit(teacher, x, y);
        out.teacher_quality = metrics(y, fitted_teacher.predict(x));
        labels = pseudo_label(fitted_teacher, samples);
    }

    detail::attach_generated(out, samples, labels);
    return out;
}

} // namespace fagc
