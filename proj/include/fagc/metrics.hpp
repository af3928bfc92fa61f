/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fagc/error.hpp"
#include "fagc/random.hpp"

namespace fagc {

/// Regression scores. r2 is empty when the observations have zero variance.
struct Metrics {
    std::optional<double> r2;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

inline Metrics metrics(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw Error(ErrorCode::DimensionMismatch, "y_true and y_pred differ in length");
    }
    if (y_true.empty()) throw Error(ErrorCode::DimensionMismatch, "empty metric input");

    const double n = static_cast<double>(y_true.size());
    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= n;

    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double e = y_true[i] - y_pred[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        total += (y_true[i] - mean) * (y_true[i] - mean);
    }

    Metrics m;
    m.mae = abs_sum / n;
    m.mse = sq_sum / n;
    m.rmse = std::sqrt(m.mse);
    bool constant = true;
    for (double v : y_true) constant = constant && v == y_true.front();
    if (!constant) m.r2 = 1.0 - sq_sum / total;
    return m;
}

/// Coefficient of determination; throws ZeroVariance for constant observations.
inline double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
    const Metrics m = metrics(y_true, y_pred);
    if (!m.r2) throw Error(ErrorCode::ZeroVariance, "R^2 is undefined for constant observations");
    return *m.r2;
}

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded shuffle followed by contiguous slicing into k test blocks whose
/// sizes differ by at most one. Index lists within a fold are sorted.
inline std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) {
        throw Error(ErrorCode::ParamOutOfRange, "fold count must satisfy 2 <= k <= n");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(splitmix64(seed));
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i + 1));
        std::swap(perm[i], perm[j]);
    }

    std::vector<Fold> folds(k);
    std::vector<std::size_t> owner(n);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t at = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) owner[perm[at++]] = f;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < k; ++f) (owner[i] == f ? folds[f].test : folds[f].train).push_back(i);
    }
    return folds;
}

} // namespace fagc
