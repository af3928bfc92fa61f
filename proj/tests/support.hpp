/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Shared test helpers: random inputs, temporary directories and the
// independent oracles the unit and acceptance suites compare against.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fagc/geodesic.hpp"
#include "fagc/preshape.hpp"
#include "fagc/random.hpp"
#include "fagc/regressors.hpp"

namespace fagc::testkit {

inline std::vector<double> random_vector(Rng& rng, std::size_t dim, double scale = 1.0, double offset = 0.0) {
    std::vector<double> v(dim);
    for (auto& x : v) x = offset + scale * standard_normal(rng);
    return v;
}

inline PreShapePoint random_point(Rng& rng, std::size_t dim) { return project(random_vector(rng, dim)); }

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("fagc-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// Oracles

struct NaiveMetrics {
    double r2 = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

/// Textbook formulas, long double accumulation, no shared code with the library.
inline NaiveMetrics naive_metrics(const std::vector<double>& y, const std::vector<double>& p) {
    const std::size_t n = y.size();
    long double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<long double>(n);
    long double ss_res = 0, ss_tot = 0, abs_err = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double e = static_cast<long double>(y[i]) - p[i];
        ss_res += e * e;
        abs_err += e < 0 ? -e : e;
        const long double c = static_cast<long double>(y[i]) - mean;
        ss_tot += c * c;
    }
    NaiveMetrics m;
    m.mae = static_cast<double>(abs_err / n);
    m.mse = static_cast<double>(ss_res / n);
    m.rmse = std::sqrt(m.mse);
    m.r2 = static_cast<double>(1.0L - ss_res / ss_tot);
    return m;
}

/// Minimum over a uniform t-grid of the distance to points on the arc.
inline double grid_segment_distance(const PreShapePoint& p, const GeodesicSegment& seg, std::size_t steps) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        best = std::min(best, geodesic_distance(p, point_at(seg, t)));
    }
    return best;
}

struct BruteSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double sse = 0.0;  // children's total squared error
};

/// Every (feature, midpoint) split scored by direct SSE computation. Ties go to
/// the lowest feature, then the lowest threshold.
inline BruteSplit brute_force_split(const Matrix& x, const std::vector<double>& y) {
    const auto sse_of = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double m = 0.0;
        for (double a : v) m += a;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (double a : v) s += (a - m) * (a - m);
        return s;
    };
    BruteSplit best;
    const std::size_t d = x.front().size();
    const double total = sse_of(y);
    for (std::size_t f = 0; f < d; ++f) {
        std::vector<double> values;
        for (const auto& r : x) values.push_back(r[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            const double thr = 0.5 * (values[k] + values[k + 1]);
            std::vector<double> l, r;
            for (std::size_t i = 0; i < x.size(); ++i) (x[i][f] <= thr ? l : r).push_back(y[i]);
            const double s = sse_of(l) + sse_of(r);
            const double tol = 1e-9 * std::max(1.0, total);
            if (!best.found || s < best.sse - tol) {
                best = {true, static_cast<int>(f), thr, s};
            }
        }
    }
    return best;
}

struct Grid {
    std::vector<std::vector<double>> points;  // candidate inputs
    std::vector<double> labels;               // candidate labels
};

// Calls visit(x, y) for every multiset of (point, label) items of size 2..max_n.
inline void for_each_dataset(const Grid& g, std::size_t max_n, const std::function<void(const Matrix&, const std::vector<double>&)>& visit) {
    std::vector<std::pair<std::size_t, std::size_t>> items;
    for (std::size_t p = 0; p < g.points.size(); ++p) {
        for (std::size_t l = 0; l < g.labels.size(); ++l) items.emplace_back(p, l);
    }
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (pick.size() >= 2) {
            Matrix x;
            std::vector<double> y;
            for (auto i : pick) {
                x.push_back(g.points[items[i].first]);
                y.push_back(g.labels[items[i].second]);
            }
            visit(x, y);
        }
        if (pick.size() == max_n) return;
        for (std::size_t i = start; i < items.size(); ++i) {
            pick.push_back(i);
            rec(i);
            pick.pop_back();
        }
    };
    rec(0);
}

// Compares every internal node's split against brute-force enumeration over
// the rows that reach it. Returns the number of mismatches.
inline std::size_t check_tree(const TreeModel& tree, const Matrix& x, const std::vector<double>& y) {
    std::size_t bad = 0;
    std::function<void(int, const std::vector<std::size_t>&)> walk = [&](int at,
                                                                        const std::vector<std::size_t>& rows) {
        const auto& node = tree.nodes[at];
        Matrix sx;
        std::vector<double> sy;
        for (auto r : rows) {
            sx.push_back(x[r]);
            sy.push_back(y[r]);
        }
        const bool pure = std::all_of(sy.begin(), sy.end(), [&](double v) { return v == sy.front(); });
        const auto brute = pure ? BruteSplit{} : brute_force_split(sx, sy);
        if (node.feature < 0) {
            double mean = 0.0;
            for (double v : sy) mean += v;
            mean /= static_cast<double>(sy.size());
            if (brute.found || std::abs(node.value - mean) > 1e-12) ++bad;
            return;
        }
        if (!brute.found || brute.feature != node.feature || brute.threshold != node.threshold) {
            ++bad;
            return;
        }
        std::vector<std::size_t> l, r;
        for (auto i : rows) (x[i][node.feature] <= node.threshold ? l : r).push_back(i);
        walk(node.left, l);
        walk(node.right, r);
    };
    std::vector<std::size_t> rows(x.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    walk(0, rows);
    return bad;
}

} // namespace fagc::testkit
