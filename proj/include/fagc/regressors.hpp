/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief From-scratch regressors used as pseudo-label teachers and students.
 *
 *  Kinds: ordinary least squares, k-nearest neighbours, CART regression
 *  tree, extremely randomised tree, bagged CART and AdaBoost.R2. A
 *  `Regressor` is an unfitted specification; `fit` turns it into an
 *  immutable `FittedRegressor`.
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fagc/error.hpp"
#include "fagc/preshape.hpp"
#include "fagc/random.hpp"

namespace fagc {

/// Row-major sample matrix: one inner vector per sample.
using Matrix = std::vector<std::vector<double>>;

enum class RegressorKind { Linear, KNN, DecisionTree, ExtraTree, Bagging, AdaBoostR2 };

inline constexpr RegressorKind kAllRegressorKinds[] = {
    RegressorKind::Linear,     RegressorKind::KNN,     RegressorKind::DecisionTree,
    RegressorKind::ExtraTree,  RegressorKind::Bagging, RegressorKind::AdaBoostR2,
};

constexpr std::string_view to_string(RegressorKind kind) noexcept {
    switch (kind) {
    case RegressorKind::Linear: return "linear";
    case RegressorKind::KNN: return "knn";
    case RegressorKind::DecisionTree: return "dt";
    case RegressorKind::ExtraTree: return "et";
    case RegressorKind::Bagging: return "bagging";
    case RegressorKind::AdaBoostR2: return "adaboost";
    }
    return "unknown";
}

inline RegressorKind parse_regressor_kind(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "linear" || s == "lr") return RegressorKind::Linear;
    if (s == "knn") return RegressorKind::KNN;
    if (s == "dt" || s == "decisiontree") return RegressorKind::DecisionTree;
    if (s == "et" || s == "extratree") return RegressorKind::ExtraTree;
    if (s == "bagging") return RegressorKind::Bagging;
    if (s == "adaboost" || s == "adaboostr2") return RegressorKind::AdaBoostR2;
    throw Error(ErrorCode::ParamOutOfRange, "unknown regressor kind '" + std::string(name) + "'");
}

/// Hyperparameters for every kind; each kind reads only its own fields.
struct Hyperparameters {
    double ridge_jitter = 1e-8;          // Linear
    std::size_t knn_k = 3;               // KNN
    std::size_t max_depth = 0;           // DecisionTree, ExtraTree, Bagging; 0 = unbounded
    std::size_t min_leaf = 1;            // all trees
    std::size_t bagging_estimators = 10; // Bagging
    std::size_t boosting_stages = 50;    // AdaBoostR2
    std::size_t boosting_max_depth = 3;  // AdaBoostR2 base trees
    std::uint64_t seed = 0;              // ExtraTree, Bagging, AdaBoostR2

    bool operator==(const Hyperparameters&) const = default;
};

struct Regressor {
    RegressorKind kind = RegressorKind::DecisionTree;
    Hyperparameters params{};
    std::string name;  // report label; empty means the kind's short name
};

inline std::string display_name(const Regressor& r) {
    return r.name.empty() ? std::string(to_string(r.kind)) : r.name;
}

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
};

struct KnnModel {
    std::size_t k = 3;
    Matrix samples;
    std::vector<double> labels;
};

/// Flat binary tree; a node with feature < 0 is a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct TreeModel {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const {
        int at = 0;
        while (nodes[at].feature >= 0) {
            const auto& n = nodes[at];
            at = x[n.feature] <= n.threshold ? n.left : n.right;
        }
        return nodes[at].value;
    }

    std::size_t depth() const {
        std::size_t best = 0;
        std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [at, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            if (nodes[at].feature >= 0) {
                stack.emplace_back(nodes[at].left, d + 1);
                stack.emplace_back(nodes[at].right, d + 1);
            }
        }
        return best;
    }
};

struct BaggingModel {
    std::vector<TreeModel> trees;
};

struct AdaBoostModel {
    std::vector<TreeModel> trees;
    std::vector<double> estimator_weights;
};

using ModelState =
    std::variant<std::monostate, LinearModel, KnnModel, TreeModel, BaggingModel, AdaBoostModel>;

namespace detail {

inline void validate_training(const Matrix& x, std::span<const double> y) {
    if (x.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training samples");
    if (x.size() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "sample and label counts differ");
    }
    const std::size_t d = x.front().size();
    if (d == 0) throw Error(ErrorCode::DimensionMismatch, "zero-dimensional features");
    for (const auto& row : x) {
        if (row.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged training matrix");
        require_finite(row, "training features contain NaN or Inf");
    }
    require_finite(y, "training labels contain NaN or Inf");
}

// ---------------------------------------------------------------------------
// Regression trees

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;
};

class TreeBuilder {
public:
    enum class Mode { Exhaustive, Randomized };

    TreeBuilder(const Matrix& x, std::span<const double> y, Mode mode, std::size_t max_depth,
                std::size_t min_leaf, std::uint64_t seed)
        : x_(x), y_(y), mode_(mode), max_depth_(max_depth), min_leaf_(std::max<std::size_t>(1, min_leaf)),
          rng_(seed) {}

    TreeModel build(std::vector<std::size_t> rows) {
        tree_.nodes.clear();
        grow(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t> rows, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        double lo = y_[rows.front()];
        double hi = lo;
        double sum = 0.0;
        for (auto r : rows) {
            lo = std::min(lo, y_[r]);
            hi = std::max(hi, y_[r]);
            sum += y_[r];
        }
        tree_.nodes[id].value = std::clamp(sum / static_cast<double>(rows.size()), lo, hi);

        const bool depth_left = max_depth_ == 0 || depth < max_depth_;
        if (!depth_left || lo == hi || rows.size() < 2 * min_leaf_) return id;

        const SplitChoice split = mode_ == Mode::Exhaustive ? best_split(rows) : random_split(rows);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (x_[r][split.feature] <= split.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree_.nodes[id].feature = split.feature;
        tree_.nodes[id].threshold = split.threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    // Weighted variance reduction n_l n_r / n (mean_l - mean_r)^2, which equals
    // SSE(parent) - SSE(left) - SSE(right) without the cancellation.
    static double gain(double sum_l, std::size_t n_l, double sum_r, std::size_t n_r) {
        const double nl = static_cast<double>(n_l);
        const double nr = static_cast<double>(n_r);
        const double diff = sum_l / nl - sum_r / nr;
        return nl * nr / (nl + nr) * diff * diff;
    }

    double tie_tolerance(const std::vector<std::size_t>& rows) const {
        double sum = 0.0;
        for (auto r : rows) sum += y_[r];
        const double mean = sum / static_cast<double>(rows.size());
        double sse = 0.0;
        for (auto r : rows) sse += (y_[r] - mean) * (y_[r] - mean);
        return 1e-12 * std::max(sse, std::numeric_limits<double>::min());
    }

    SplitChoice best_split(const std::vector<std::size_t>& rows) const {
        const std::size_t n = rows.size();
        const std::size_t dims = x_.front().size();
        const double tol = tie_tolerance(rows);
        double total = 0.0;
        for (auto r : rows) total += y_[r];

        SplitChoice best;
        std::vector<std::size_t> order(rows);
        for (std::size_t f = 0; f < dims; ++f) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
            double prefix = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                prefix += y_[order[i]];
                const double here = x_[order[i]][f];
                const double next = x_[order[i + 1]][f];
                if (!(here < next)) continue;
                const std::size_t n_l = i + 1;
                const std::size_t n_r = n - n_l;
                if (n_l < min_leaf_ || n_r < min_leaf_) continue;
                const double g = gain(prefix, n_l, total - prefix, n_r);
                if (best.feature < 0 || g > best.gain + tol) {
                    double mid = here + (next - here) * 0.5;
                    if (!(mid < next)) mid = here;
                    best = {static_cast<int>(f), mid, g};
                }
            }
        }
        return best;
    }

    SplitChoice random_split(const std::vector<std::size_t>& rows) {
        const std::size_t dims = x_.front().size();
        const double tol = tie_tolerance(rows);
        SplitChoice best;
        for (std::size_t f = 0; f < dims; ++f) {
            double lo = x_[rows.front()][f];
            double hi = lo;
            for (auto r : rows) {
                lo = std::min(lo, x_[r][f]);
                hi = std::max(hi, x_[r][f]);
            }
            if (!(lo < hi)) continue;
            double thr = lo + uniform01(rng_) * (hi - lo);
            if (!(thr < hi)) thr = lo;

            double sum_l = 0.0;
            double sum_r = 0.0;
            std::size_t n_l = 0;
            for (auto r : rows) {
                if (x_[r][f] <= thr) {
                    sum_l += y_[r];
                    ++n_l;
                } else {
                    sum_r += y_[r];
                }
            }
            const std::size_t n_r = rows.size() - n_l;
            if (n_l < min_leaf_ || n_r < min_leaf_) continue;
            const double g = gain(sum_l, n_l, sum_r, n_r);
            if (best.feature < 0 || g > best.gain + tol) best = {static_cast<int>(f), thr, g};
        }
        return best;
    }

    const Matrix& x_;
    std::span<const double> y_;
    Mode mode_;
    std::size_t max_depth_;
    std::size_t min_leaf_;
    Rng rng_;
    TreeModel tree_;
};

inline std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

inline TreeModel fit_cart(const Matrix& x, std::span<const double> y, std::vector<std::size_t> rows,
                          std::size_t max_depth, std::size_t min_leaf) {
    TreeBuilder b(x, y, TreeBuilder::Mode::Exhaustive, max_depth, min_leaf, 0);
    return b.build(std::move(rows));
}

// ---------------------------------------------------------------------------
// Linear least squares

inline LinearModel fit_linear(const Matrix& x, std::span<const double> y, double jitter) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index d = static_cast<Eigen::Index>(x.front().size());
    Eigen::MatrixXd xc(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) xc(i, j) = x[i][j];
    }
    Eigen::VectorXd yc(n);
    for (Eigen::Index i = 0; i < n; ++i) yc(i) = y[i];
    const Eigen::RowVectorXd x_mean = xc.colwise().mean();
    const double y_mean = yc.mean();
    xc.rowwise() -= x_mean;
    yc.array() -= y_mean;

    // Solve the smaller of the primal (d x d) and dual (n x n) Gram systems.
    const bool dual = d > n;
    Eigen::MatrixXd gram = dual ? Eigen::MatrixXd(xc * xc.transpose())
                                : Eigen::MatrixXd(xc.transpose() * xc);
    const Eigen::VectorXd rhs = dual ? yc : Eigen::VectorXd(xc.transpose() * yc);

    auto solve = [&](const Eigen::MatrixXd& g) -> std::optional<Eigen::VectorXd> {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
        if (ldlt.info() != Eigen::Success) return std::nullopt;
        const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
        if (diag.size() == 0 || diag.minCoeff() <= 1e-12 * std::max(diag.maxCoeff(), 1e-300)) {
            return std::nullopt;
        }
        return Eigen::VectorXd(ldlt.solve(rhs));
    };

    std::optional<Eigen::VectorXd> sol = solve(gram);
    if (!sol) {
        gram.diagonal().array() += jitter;
        sol = solve(gram);
        if (!sol) {
            // All-zero centred design: only the intercept is identifiable.
            sol = Eigen::VectorXd::Zero(rhs.size());
        }
    }
    const Eigen::VectorXd w = dual ? Eigen::VectorXd(xc.transpose() * *sol) : *sol;

    LinearModel m;
    m.weights.assign(w.data(), w.data() + w.size());
    m.bias = y_mean - x_mean.dot(w);
    return m;
}

inline double predict_linear(const LinearModel& m, std::span<const double> x) {
    return m.bias + dot(m.weights, x);
}

// ---------------------------------------------------------------------------
// k nearest neighbours

inline double predict_knn(const KnnModel& m, std::span<const double> x) {
    const std::size_t k = std::min(m.k, m.samples.size());
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(m.samples.size());
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double diff = m.samples[i][j] - x[j];
            s += diff * diff;
        }
        dist.emplace_back(s, i);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += m.labels[dist[i].second];
    return sum / static_cast<double>(k);
}

// ---------------------------------------------------------------------------
// Ensembles

inline std::vector<std::size_t> bootstrap_rows(std::size_t n, Rng& rng) {
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = static_cast<std::size_t>(uniform_index(rng, n));
    return rows;
}

inline BaggingModel fit_bagging(const Matrix& x, std::span<const double> y, const Hyperparameters& hp) {
    BaggingModel m;
    const std::size_t count = std::max<std::size_t>(1, hp.bagging_estimators);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(hp.seed, i));
        m.trees.push_back(fit_cart(x, y, bootstrap_rows(x.size(), rng), hp.max_depth, hp.min_leaf));
    }
    return m;
}

/// Drucker's AdaBoost.R2 with the linear loss.
inline AdaBoostModel fit_adaboost(const Matrix& x, std::span<const double> y, const Hyperparameters& hp) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> cdf(n);
    AdaBoostModel m;

    const std::size_t stages = std::max<std::size_t>(1, hp.boosting_stages);
    for (std::size_t stage = 0; stage < stages; ++stage) {
        Rng rng(derive_seed(hp.seed, stage));
        std::partial_sum(w.begin(), w.end(), cdf.begin());
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) {
            const double u = uniform01(rng) * cdf.back();
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            r = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n - 1);
        }
        TreeModel tree = fit_cart(x, y, std::move(rows), hp.boosting_max_depth, hp.min_leaf);

        std::vector<double> loss(n);
        double max_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            loss[i] = std::abs(tree.predict(x[i]) - y[i]);
            max_err = std::max(max_err, loss[i]);
        }
        if (max_err > 0.0) {
            for (auto& l : loss) l /= max_err;
        }
        double avg_loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) avg_loss += w[i] * loss[i];

        if (avg_loss <= 0.0) {
            // Perfect stage: keep it and stop.
            m.trees.push_back(std::move(tree));
            m.estimator_weights.push_back(1.0);
            break;
        }
        if (avg_loss >= 0.5) {
            if (m.trees.empty()) {
                m.trees.push_back(std::move(tree));
                m.estimator_weights.push_back(1.0);
            }
            break;
        }

        const double beta = avg_loss / (1.0 - avg_loss);
        m.trees.push_back(std::move(tree));
        m.estimator_weights.push_back(std::log(1.0 / beta));

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] *= std::pow(beta, 1.0 - loss[i]);
            total += w[i];
        }
        for (auto& wi : w) wi /= total;
    }
    return m;
}

/// Smallest prediction whose cumulative estimator weight reaches half the total.
inline double weighted_median(const AdaBoostModel& m, std::span<const double> x) {
    std::vector<std::pair<double, double>> preds;
    preds.reserve(m.trees.size());
    double total = 0.0;
    for (std::size_t i = 0; i < m.trees.size(); ++i) {
        preds.emplace_back(m.trees[i].predict(x), m.estimator_weights[i]);
        total += m.estimator_weights[i];
    }
    std::sort(preds.begin(), preds.end());
    double acc = 0.0;
    for (const auto& [p, wt] : preds) {
        acc += wt;
        if (acc >= 0.5 * total) return p;
    }
    return preds.back().first;
}

} // namespace detail

/// A fitted model, immutable; default-constructed instances reject predict().
class FittedRegressor {
public:
    FittedRegressor() = default;

    FittedRegressor(Regressor spec, std::size_t feature_dim, ModelState state, double label_min,
                    double label_max)
        : spec_(spec), feature_dim_(feature_dim), state_(std::move(state)), label_min_(label_min),
          label_max_(label_max) {}

    /// Wraps externally supplied weights, e.g. an exported network head.
    static FittedRegressor from_linear(std::vector<double> weights, double bias) {
        const std::size_t d = weights.size();
        if (d == 0) throw Error(ErrorCode::DimensionMismatch, "linear model without weights");
        detail::require_finite(weights, "linear weights contain NaN or Inf");
        if (!std::isfinite(bias)) throw Error(ErrorCode::NonFinite, "linear bias is not finite");
        return FittedRegressor(Regressor{RegressorKind::Linear, {}, {}}, d,
                               LinearModel{std::move(weights), bias},
                               -std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity());
    }

    bool fitted() const noexcept { return !std::holds_alternative<std::monostate>(state_); }
    RegressorKind kind() const noexcept { return spec_.kind; }
    const Regressor& spec() const noexcept { return spec_; }
    std::size_t feature_dim() const noexcept { return feature_dim_; }
    const ModelState& state() const noexcept { return state_; }
    double label_min() const noexcept { return label_min_; }
    double label_max() const noexcept { return label_max_; }

    double predict_one(std::span<const double> x) const {
        if (!fitted()) throw Error(ErrorCode::NotFitted, "predict called before fit");
        if (x.size() != feature_dim_) {
            throw Error(ErrorCode::DimensionMismatch,
                        "expected " + std::to_string(feature_dim_) + " features, got " +
                            std::to_string(x.size()));
        }
        return std::visit(
            [&](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, std::monostate>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, LinearModel>) {
                    return detail::predict_linear(m, x);
                } else if constexpr (std::is_same_v<T, KnnModel>) {
                    return detail::predict_knn(m, x);
                } else if constexpr (std::is_same_v<T, TreeModel>) {
                    return m.predict(x);
                } else if constexpr (std::is_same_v<T, BaggingModel>) {
                    double s = 0.0;
                    for (const auto& t : m.trees) s += t.predict(x);
                    return std::clamp(s / static_cast<double>(m.trees.size()), label_min_, label_max_);
                } else {
                    return detail::weighted_median(m, x);
                }
            },
            state_);
    }

    std::vector<double> predict(const Matrix& x) const {
        std::vector<double> out;
        out.reserve(x.size());
        for (const auto& row : x) out.push_back(predict_one(row));
        return out;
    }

    std::vector<double> predict(const std::vector<FeatureVector>& x) const {
        std::vector<double> out;
        out.reserve(x.size());
        for (const auto& row : x) out.push_back(predict_one(row.values));
        return out;
    }

private:
    Regressor spec_{};
    std::size_t feature_dim_ = 0;
    ModelState state_{};
    double label_min_ = 0.0;
    double label_max_ = 0.0;
};

inline FittedRegressor fit(const Regressor& spec, const Matrix& x, std::span<const double> y) {
    detail::validate_training(x, y);
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const Hyperparameters& hp = spec.params;

    ModelState state;
    switch (spec.kind) {
    case RegressorKind::Linear:
        state = detail::fit_linear(x, y, hp.ridge_jitter);
        break;
    case RegressorKind::KNN:
        if (hp.knn_k == 0) throw Error(ErrorCode::ParamOutOfRange, "knn_k must be positive");
        state = KnnModel{hp.knn_k, x, std::vector<double>(y.begin(), y.end())};
        break;
    case RegressorKind::DecisionTree:
        state = detail::fit_cart(x, y, detail::all_rows(x.size()), hp.max_depth, hp.min_leaf);
        break;
    case RegressorKind::ExtraTree: {
        detail::TreeBuilder b(x, y, detail::TreeBuilder::Mode::Randomized, hp.max_depth, hp.min_leaf,
                              derive_seed(hp.seed, 0));
        state = b.build(detail::all_rows(x.size()));
        break;
    }
    case RegressorKind::Bagging:
        state = detail::fit_bagging(x, y, hp);
        break;
    case RegressorKind::AdaBoostR2:
        state = detail::fit_adaboost(x, y, hp);
        break;
    }
    return FittedRegressor(spec, x.front().size(), std::move(state), *lo, *hi);
}

inline Matrix to_matrix(const std::vector<FeatureVector>& rows) {
    Matrix m;
    m.reserve(rows.size());
    for (const auto& r : rows) m.push_back(r.values);
    return m;
}

inline FittedRegressor fit(const Regressor& spec, const std::vector<FeatureVector>& x,
                           std::span<const double> y) {
    return fit(spec, to_matrix(x), y);
}

} // namespace fagc
