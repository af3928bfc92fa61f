/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief Synthetic small-sample regression data: noisy features along a
 *  smooth curve, labelled monotonically in the curve parameter.
 *
 *  The noise-free curve is phi(s) = cos(s a) u + sin(s a) v with u, v
 *  orthonormal and zero-mean across coordinates, i.e. a great-circle arc
 *  of the pre-shape sphere. Curve positions are stratified: sample i sits
 *  in the i-th of M equal bins with a uniform jitter.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fagc/augment.hpp"
#include "fagc/random.hpp"

namespace fagc {

struct CurveBenchmarkOptions {
    std::size_t samples = 18;
    std::size_t dim = 32;
    double noise = 0.01;                       // per-coordinate Gaussian std-dev
    double arc = std::numbers::pi / 2.0;       // curve angle swept as s goes 0 -> 1
    double jitter = 0.5;                       // fraction of a bin the position may move
    double label_offset = 60.0;
    double label_scale = 25.0;
    std::uint64_t seed = 0;
};

struct CurveBenchmark {
    std::vector<LabeledSample> samples;
    std::vector<double> parameter;  // s of each sample
    std::vector<double> u;          // curve plane basis
    std::vector<double> v;
};

namespace detail {

inline std::vector<double> centered_unit(std::size_t dim, Rng& rng) {
    std::vector<double> v(dim);
    double mean = 0.0;
    for (auto& c : v) {
        c = standard_normal(rng);
        mean += c;
    }
    mean /= static_cast<double>(dim);
    for (auto& c : v) c -= mean;
    const double n = norm(v);
    for (auto& c : v) c /= n;
    return v;
}

} // namespace detail

inline CurveBenchmark make_curve_benchmark(const CurveBenchmarkOptions& opt) {
    if (opt.dim < 3 || opt.samples < 2) {
        throw Error(ErrorCode::ParamOutOfRange, "curve benchmark needs dim >= 3 and samples >= 2");
    }
    Rng rng(splitmix64(opt.seed));
    const std::vector<double> u = detail::centered_unit(opt.dim, rng);
    std::vector<double> v = detail::centered_unit(opt.dim, rng);
    const double proj = detail::dot(v, u);
    for (std::size_t j = 0; j < opt.dim; ++j) v[j] -= proj * u[j];
    const double vn = detail::norm(v);
    for (auto& c : v) c /= vn;

    CurveBenchmark out;
    out.u = u;
    out.v = v;
    const double bins = static_cast<double>(opt.samples);
    for (std::size_t i = 0; i < opt.samples; ++i) {
        const double s =
            (static_cast<double>(i) + 0.5 + opt.jitter * (uniform01(rng) - 0.5)) / bins;
        const double a = std::cos(s * opt.arc);
        const double b = std::sin(s * opt.arc);
        LabeledSample sample;
        sample.features.id = "s" + std::to_string(i);
        sample.features.values.resize(opt.dim);
        for (std::size_t j = 0; j < opt.dim; ++j) {
            sample.features.values[j] = a * u[j] + b * v[j] + opt.noise * standard_normal(rng);
        }
        sample.label = opt.label_offset + opt.label_scale * s;
        out.samples.push_back(std::move(sample));
        out.parameter.push_back(s);
    }
    return out;
}

/// The noise-free label-generating function: the curve position of x, read
/// off its angle in the (u, v) plane. Invariant to centring and scale, so it
/// applies to raw and normalised features alike.
inline double curve_label(const CurveBenchmark& bench, const CurveBenchmarkOptions& opt,
                          std::span<const double> x) {
    const double angle = std::atan2(detail::dot(x, bench.v), detail::dot(x, bench.u));
    return opt.label_offset + opt.label_scale * (angle / opt.arc);
}

} // namespace fagc
