/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief Great-circle segments on the pre-shape sphere.
 *
 *  A segment is fitted to a point cloud by trying every pair of input
 *  points as endpoints and keeping the pair with the smallest sum of
 *  squared point-to-arc distances. New features are drawn by constant
 *  speed interpolation (slerp) along the chosen arc.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "fagc/error.hpp"
#include "fagc/preshape.hpp"

namespace fagc {

/// Chord length below which two points count as identical (or antipodal).
inline constexpr double kCoincidentChord = 1e-9;

class GeodesicSegment {
public:
    GeodesicSegment(PreShapePoint z1, PreShapePoint z2) : z1_(std::move(z1)), z2_(std::move(z2)) {
        if (z1_.coords.size() != z2_.coords.size()) {
            throw Error(ErrorCode::DimensionMismatch, "segment endpoints differ in length");
        }
        if (degenerate_pair(z1_, z2_)) {
            throw Error(ErrorCode::ParamOutOfRange,
                        "segment endpoints must be neither identical nor antipodal");
        }
        theta_ = geodesic_distance(z1_, z2_);
        const double c = std::cos(theta_);
        const double s = std::sin(theta_);
        // Second orthonormal basis vector of the plane spanned by z1, z2.
        ortho_.resize(z1_.coords.size());
        for (std::size_t i = 0; i < ortho_.size(); ++i) {
            ortho_[i] = (z2_.coords[i] - c * z1_.coords[i]) / s;
        }
        const double n = detail::norm(ortho_);
        for (double& v : ortho_) v /= n;
    }

    const PreShapePoint& z1() const noexcept { return z1_; }
    const PreShapePoint& z2() const noexcept { return z2_; }
    double theta() const noexcept { return theta_; }
    std::size_t dimension() const noexcept { return z1_.coords.size(); }

    /// Unit vector in the arc plane orthogonal to z1, pointing towards z2.
    const std::vector<double>& ortho() const noexcept { return ortho_; }

    static bool degenerate_pair(const PreShapePoint& a, const PreShapePoint& b) {
        double minus = 0.0;
        double plus = 0.0;
        for (std::size_t i = 0; i < a.coords.size(); ++i) {
            const double dm = a.coords[i] - b.coords[i];
            const double dp = a.coords[i] + b.coords[i];
            minus += dm * dm;
            plus += dp * dp;
        }
        return std::sqrt(minus) < kCoincidentChord || std::sqrt(plus) < kCoincidentChord;
    }

private:
    PreShapePoint z1_;
    PreShapePoint z2_;
    double theta_ = 0.0;
    std::vector<double> ortho_;
};

/// Slerp between the endpoints; t = 0 gives z1 and t = 1 gives z2 exactly.
inline PreShapePoint point_at(const GeodesicSegment& seg, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw Error(ErrorCode::ParamOutOfRange, "interpolation parameter outside [0, 1]");
    }
    if (t == 0.0) return PreShapePoint{seg.z1().coords, {}};
    if (t == 1.0) return PreShapePoint{seg.z2().coords, {}};

    const double theta = seg.theta();
    const double s = std::sin(theta);
    const double w1 = std::sin((1.0 - t) * theta) / s;
    const double w2 = std::sin(t * theta) / s;
    PreShapePoint g;
    g.coords.resize(seg.dimension());
    const auto& a = seg.z1().coords;
    const auto& b = seg.z2().coords;
    for (std::size_t i = 0; i < g.coords.size(); ++i) g.coords[i] = w1 * a[i] + w2 * b[i];
    return g;
}

/// Distance from p to the nearest point of the arc (not the full great circle).
inline double point_to_segment_distance(const PreShapePoint& p, const GeodesicSegment& seg) {
    if (p.coords.size() != seg.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "point and segment differ in length");
    }
    const auto& e1 = seg.z1().coords;
    const auto& e2 = seg.ortho();
    const double a = detail::dot(p.coords, e1);
    const double b = detail::dot(p.coords, e2);
    const double phi = std::atan2(b, a);
    if (a == 0.0 && b == 0.0) return std::numbers::pi / 2.0;
    if (phi >= 0.0 && phi <= seg.theta()) {
        // Angle between p and its in-plane component.
        double perp = 0.0;
        for (std::size_t i = 0; i < e1.size(); ++i) {
            const double r = p.coords[i] - a * e1[i] - b * e2[i];
            perp += r * r;
        }
        return std::atan2(std::sqrt(perp), std::hypot(a, b));
    }
    return std::min(geodesic_distance(p, seg.z1()), geodesic_distance(p, seg.z2()));
}

inline double segment_cost(const std::vector<PreShapePoint>& points, const GeodesicSegment& seg) {
    double cost = 0.0;
    for (const auto& p : points) {
        const double d = point_to_segment_distance(p, seg);
        cost += d * d;
    }
    return cost;
}

struct GeodesicFit {
    GeodesicSegment segment;
    std::size_t first = 0;   // index of z1 in the input
    std::size_t second = 0;  // index of z2 in the input
    double cost = 0.0;
};

/// Exhaustive endpoint search over all input pairs. Ties in cost go to the
/// longer arc, then to the lexicographically first pair.
inline GeodesicFit fit_geodesic_indexed(const std::vector<PreShapePoint>& points) {
    if (points.size() < 2) {
        throw Error(ErrorCode::InsufficientPoints, "need at least two points to fit a geodesic");
    }
    const std::size_t dim = points.front().coords.size();
    for (const auto& p : points) {
        if (p.coords.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "points differ in length");
        }
    }

    std::optional<GeodesicFit> best;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (GeodesicSegment::degenerate_pair(points[i], points[j])) continue;
            GeodesicSegment seg(points[i], points[j]);
            const double cost = segment_cost(points, seg);
            if (!best) {
                best.emplace(GeodesicFit{std::move(seg), i, j, cost});
                continue;
            }
            const double tol = 1e-12 * std::max(1.0, best->cost);
            const bool lower = cost < best->cost - tol;
            const bool tied = !lower && cost <= best->cost + tol;
            if (lower || (tied && seg.theta() > best->segment.theta() + 1e-12)) {
                best.emplace(GeodesicFit{std::move(seg), i, j, cost});
            }
        }
    }
    if (!best) {
        throw Error(ErrorCode::AllDegenerate, "every candidate pair is identical or antipodal");
    }
    return std::move(*best);
}

inline GeodesicSegment fit_geodesic(const std::vector<PreShapePoint>& points) {
    return fit_geodesic_indexed(points).segment;
}

/// K points spaced evenly in arc length, endpoints included for K >= 2.
inline std::vector<PreShapePoint> sample_uniform(const GeodesicSegment& seg, std::size_t count) {
    if (count == 0) throw Error(ErrorCode::ParamOutOfRange, "sample count must be positive");
    std::vector<PreShapePoint> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(point_at(seg, 0.5));
        return out;
    }
    const double denom = static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = k + 1 == count ? 1.0 : static_cast<double>(k) / denom;
        out.push_back(point_at(seg, t));
    }
    return out;
}

} // namespace fagc
