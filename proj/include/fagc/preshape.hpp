/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief Projection of raw feature vectors onto the pre-shape sphere.
 *
 *  A D-dimensional feature (x_1 ... x_D) is read as D planar landmarks
 *  (x_i, y_i) with y_i = x_i. Translation is removed by subtracting the
 *  landmark centroid and scale by dividing through the Euclidean norm, so
 *  the result lives on the unit sphere in R^{2D} with zero landmark means.
 *  Coordinates are stored interleaved: x_1, y_1, x_2, y_2, ...
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fagc/error.hpp"

namespace fagc {

struct FeatureVector {
    std::string id;
    std::vector<double> values;
};

struct PreShapePoint {
    std::vector<double> coords;
    std::string source_id;

    std::size_t landmarks() const noexcept { return coords.size() / 2; }
};

/// Centered norms below this are treated as zero.
inline constexpr double kDegenerateNorm = 1e-12;

namespace detail {

inline void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, what);
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace detail

/// Projects a raw feature onto the pre-shape sphere.
inline PreShapePoint project(std::span<const double> values, std::string source_id = {}) {
    if (values.size() < 2) {
        throw Error(ErrorCode::ParamOutOfRange, "feature dimension must be at least 2");
    }
    detail::require_finite(values, "feature vector contains NaN or Inf");

    const std::size_t d = values.size();
    PreShapePoint z;
    z.source_id = std::move(source_id);
    z.coords.resize(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
        z.coords[2 * i] = values[i];
        z.coords[2 * i + 1] = values[i];
    }

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        mean_x += z.coords[2 * i];
        mean_y += z.coords[2 * i + 1];
    }
    mean_x /= static_cast<double>(d);
    mean_y /= static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) {
        z.coords[2 * i] -= mean_x;
        z.coords[2 * i + 1] -= mean_y;
    }

    const double n = detail::norm(z.coords);
    if (!(n >= kDegenerateNorm)) {
        throw Error(ErrorCode::DegenerateShape, "feature vector is constant");
    }
    for (double& c : z.coords) c /= n;
    return z;
}

inline PreShapePoint project(const FeatureVector& v) { return project(v.values, v.id); }

/// Reads the x-coordinate of every landmark back out as a D-dimensional feature.
inline FeatureVector unproject(const PreShapePoint& z) {
    FeatureVector v;
    v.id = z.source_id;
    v.values.resize(z.landmarks());
    for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = z.coords[2 * i];
    return v;
}

/// Pre-shape normalisation of a raw feature, expressed back in D dimensions.
inline FeatureVector normalize_feature(const FeatureVector& v) { return unproject(project(v)); }

namespace detail {

/// Angle between two unit vectors, 2 atan2(|a-b|, |a+b|). Identical to
/// arccos(<a,b>) on the sphere but keeps full precision near 0 and pi.
inline double unit_angle(std::span<const double> a, std::span<const double> b) {
    double minus = 0.0;
    double plus = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double dm = a[i] - b[i];
        const double dp = a[i] + b[i];
        minus += dm * dm;
        plus += dp * dp;
    }
    return 2.0 * std::atan2(std::sqrt(minus), std::sqrt(plus));
}

} // namespace detail

/// Great-circle distance in radians, in [0, pi].
inline double geodesic_distance(const PreShapePoint& a, const PreShapePoint& b) {
    if (a.coords.size() != b.coords.size()) {
        throw Error(ErrorCode::DimensionMismatch, "pre-shape points differ in length");
    }
    return std::clamp(detail::unit_angle(a.coords, b.coords), 0.0, std::numbers::pi);
}

/// Checks the pre-shape invariants (even length, centered, unit norm).
inline bool on_preshape_sphere(const PreShapePoint& z, double tol = 1e-9) {
    if (z.coords.empty() || z.coords.size() % 2 != 0) return false;
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < z.landmarks(); ++i) {
        sx += z.coords[2 * i];
        sy += z.coords[2 * i + 1];
    }
    return std::abs(sx) <= tol && std::abs(sy) <= tol &&
           std::abs(detail::norm(z.coords) - 1.0) <= tol;
}

} // namespace fagc
