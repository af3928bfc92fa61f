/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief Post-hoc views: per-patch property maps and a 2-D PCA embedding
 *  of feature clouds.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fagc/error.hpp"
#include "fagc/preshape.hpp"
#include "fagc/regressors.hpp"

namespace fagc {

inline constexpr std::size_t kDefaultPatchRows = 4;
inline constexpr std::size_t kDefaultPatchCols = 4;

struct PatchGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> cells;  // row-major
    std::string property_kind;

    double at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
};

/// Cell (i, j) is the model's prediction for patch i * cols + j.
inline PatchGrid patch_contribution_map(const std::vector<FeatureVector>& patches,
                                        const FittedRegressor& model,
                                        std::size_t rows = kDefaultPatchRows,
                                        std::size_t cols = kDefaultPatchCols,
                                        std::string property_kind = {}) {
    if (rows == 0 || cols == 0 || patches.size() != rows * cols) {
        throw Error(ErrorCode::CountMismatch, "expected " + std::to_string(rows * cols) +
                                                  " patch rows, got " + std::to_string(patches.size()));
    }
    if (!model.fitted()) throw Error(ErrorCode::NotFitted, "heatmap model is not fitted");
    PatchGrid grid{rows, cols, model.predict(patches), std::move(property_kind)};
    for (double v : grid.cells) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite patch prediction");
    }
    return grid;
}

namespace detail {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// rows x cols numeric grid, no header.
inline std::string heatmap_csv(const PatchGrid& grid) {
    std::string out;
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            if (c) out += ',';
            out += detail::format_real(grid.at(r, c));
        }
        out += '\n';
    }
    return out;
}

/// Plain PGM (P2), min-max normalised per grid; lighter means higher.
/// A constant grid renders as uniform mid-grey.
inline std::string heatmap_pgm(const PatchGrid& grid) {
    const auto [lo, hi] = std::minmax_element(grid.cells.begin(), grid.cells.end());
    const double span = *hi - *lo;
    std::string out = "P2\n" + std::to_string(grid.cols) + " " + std::to_string(grid.rows) + "\n255\n";
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            int level = 128;
            if (span > 0.0) level = static_cast<int>(std::lround(255.0 * (grid.at(r, c) - *lo) / span));
            if (c) out += ' ';
            out += std::to_string(std::clamp(level, 0, 255));
        }
        out += '\n';
    }
    return out;
}

/// Projection onto the top two principal components of the centred cloud.
/// Each axis is signed so its largest-magnitude loading is positive.
inline std::vector<std::pair<double, double>> embed_2d(const Matrix& points) {
    if (points.size() < 2) throw Error(ErrorCode::InsufficientPoints, "embedding needs at least two points");
    const std::size_t d = points.front().size();
    if (d < 2) throw Error(ErrorCode::InsufficientPoints, "embedding needs at least two dimensions");
    for (const auto& p : points) {
        if (p.size() != d) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
    }

    const auto n = static_cast<Eigen::Index>(points.size());
    const auto dim = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd x(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = points[i][j];
    }
    x.rowwise() -= x.colwise().mean();

    // Principal axes from whichever Gram matrix is smaller.
    Eigen::MatrixXd axes(dim, 2);
    Eigen::Vector2d eigen_values;
    if (dim <= n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * x);
        for (int k = 0; k < 2; ++k) {
            axes.col(k) = es.eigenvectors().col(dim - 1 - k);
            eigen_values(k) = es.eigenvalues()(dim - 1 - k);
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x * x.transpose());
        for (int k = 0; k < 2; ++k) {
            const double lambda = es.eigenvalues()(n - 1 - k);
            eigen_values(k) = lambda;
            Eigen::VectorXd a = x.transpose() * es.eigenvectors().col(n - 1 - k);
            const double an = a.norm();
            axes.col(k) = an > 0.0 ? Eigen::VectorXd(a / an) : Eigen::VectorXd::Zero(dim);
        }
    }

    const double top = std::max(eigen_values(0), 0.0);
    for (int k = 0; k < 2; ++k) {
        if (!(eigen_values(k) > 1e-12 * top) || top == 0.0) {
            axes.col(k).setZero();
            continue;
        }
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (std::abs(axes(j, k)) > best + 1e-12) {
                best = std::abs(axes(j, k));
                arg = j;
            }
        }
        if (axes(arg, k) < 0.0) axes.col(k) = -axes.col(k);
    }

    const Eigen::MatrixXd scores = x * axes;
    std::vector<std::pair<double, double>> out;
    out.reserve(points.size());
    for (Eigen::Index i = 0; i < n; ++i) out.emplace_back(scores(i, 0), scores(i, 1));
    return out;
}

inline std::vector<std::pair<double, double>> embed_2d(const std::vector<FeatureVector>& points) {
    return embed_2d(to_matrix(points));
}

inline std::vector<std::pair<double, double>> embed_2d(const std::vector<PreShapePoint>& points) {
    Matrix m;
    m.reserve(points.size());
    for (const auto& p : points) m.push_back(p.coords);
    return embed_2d(m);
}

struct EmbeddingRow {
    std::string id;
    double x = 0.0;
    double y = 0.0;
    std::string source;  // train, test, generated or endpoint
};

inline std::string embedding_csv(const std::vector<EmbeddingRow>& rows) {
    std::string out = "id,x,y,source\n";
    for (const auto& r : rows) {
        out += r.id + ',' + detail::format_real(r.x) + ',' + detail::format_real(r.y) + ',' + r.source + '\n';
    }
    return out;
}

} // namespace fagc
