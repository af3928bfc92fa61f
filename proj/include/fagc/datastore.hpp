/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

/*! \file
 *  \brief File formats: feature CSV, label CSV, model JSON.
 *
 *  features.csv   id,f0,f1,...,f{D-1}
 *  labels.csv     id,conductivity_iacs,hardness_hv   (empty cell = missing)
 *  model.json     {"format": "fagc-model", "format_version": 1, "kind": ...}
 *  head.json      {"weights": [...], "bias": b}      (read as a Linear model)
 *
 *  Reals are written with 17 significant digits. All writes go to a
 *  temporary file in the target directory and are renamed into place.
 */

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "fagc/analysis.hpp"
#include "fagc/augment.hpp"
#include "fagc/error.hpp"
#include "fagc/preshape.hpp"
#include "fagc/regressors.hpp"

namespace fagc {

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::string_view kModelFormatTag = "fagc-model";

enum class Property { Conductivity, Hardness };

constexpr std::string_view to_string(Property p) noexcept {
    return p == Property::Conductivity ? "conductivity" : "hardness";
}

/// Column name used in label files.
constexpr std::string_view column_name(Property p) noexcept {
    return p == Property::Conductivity ? "conductivity_iacs" : "hardness_hv";
}

inline Property parse_property(std::string_view name) {
    if (name == "conductivity" || name == "conductivity_iacs") return Property::Conductivity;
    if (name == "hardness" || name == "hardness_hv") return Property::Hardness;
    throw Error(ErrorCode::ParamOutOfRange, "unknown property '" + std::string(name) + "'");
}

struct DatasetSample {
    FeatureVector features;
    std::optional<double> conductivity_iacs;
    std::optional<double> hardness_hv;

    const std::string& id() const noexcept { return features.id; }

    std::optional<double> property(Property p) const {
        return p == Property::Conductivity ? conductivity_iacs : hardness_hv;
    }
};

struct Dataset {
    std::vector<DatasetSample> samples;
    std::size_t feature_dim = 0;

    std::vector<FeatureVector> features() const {
        std::vector<FeatureVector> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.features);
        return out;
    }
};

struct LabelRow {
    std::string id;
    std::optional<double> conductivity_iacs;
    std::optional<double> hardness_hv;
    std::size_t line = 0;
};

using LabelTable = std::vector<LabelRow>;

namespace detail {

inline std::string at_line(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline double parse_real(std::string_view cell, const std::string& where) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last) {
        throw Error(ErrorCode::ParseError, where + "not a number: '" + std::string(cell) + "'");
    }
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, where + "non-finite value '" + std::string(cell) + "'");
    return v;
}

/// Lines with their 1-based numbers, skipping blank lines.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (n == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        out.emplace_back(n, std::move(line));
    }
    return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    return in;
}

} // namespace detail

inline Dataset parse_features(std::istream& in, const std::string& source = "features") {
    const auto lines = detail::read_lines(in);
    if (lines.empty()) throw Error(ErrorCode::ParseError, detail::at_line(source, 1) + "missing header");

    const auto header = detail::split_csv(lines.front().second);
    const std::string head_where = detail::at_line(source, lines.front().first);
    if (header.front() != "id") throw Error(ErrorCode::ParseError, head_where + "first column must be 'id'");
    if (header.size() < 3) {
        throw Error(ErrorCode::ParseError, head_where + "need at least two feature columns");
    }
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j] != "f" + std::to_string(j - 1)) {
            throw Error(ErrorCode::ParseError, head_where + "expected column 'f" + std::to_string(j - 1) +
                                                   "', found '" + std::string(header[j]) + "'");
        }
    }

    Dataset ds;
    ds.feature_dim = header.size() - 1;
    std::set<std::string> ids;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::string where = detail::at_line(source, lines[r].first);
        const auto cells = detail::split_csv(lines[r].second);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::RaggedRow, where + "expected " + std::to_string(header.size()) +
                                                  " cells, found " + std::to_string(cells.size()));
        }
        if (cells.front().empty()) throw Error(ErrorCode::ParseError, where + "empty id");
        DatasetSample s;
        s.features.id = std::string(cells.front());
        if (!ids.insert(s.features.id).second) {
            throw Error(ErrorCode::DuplicateId, where + "duplicate id '" + s.features.id + "'");
        }
        s.features.values.reserve(ds.feature_dim);
        for (std::size_t j = 1; j < cells.size(); ++j) {
            s.features.values.push_back(detail::parse_real(cells[j], where));
        }
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

inline Dataset load_features(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_features(in, path.string());
}

inline LabelTable parse_labels(std::istream& in, const std::string& source = "labels") {
    const auto lines = detail::read_lines(in);
    if (lines.empty()) throw Error(ErrorCode::ParseError, detail::at_line(source, 1) + "missing header");
    const auto header = detail::split_csv(lines.front().second);
    if (header.size() != 3 || header[0] != "id" || header[1] != "conductivity_iacs" ||
        header[2] != "hardness_hv") {
        throw Error(ErrorCode::ParseError, detail::at_line(source, lines.front().first) +
                                               "header must be 'id,conductivity_iacs,hardness_hv'");
    }

    LabelTable table;
    std::set<std::string> ids;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::string where = detail::at_line(source, lines[r].first);
        const auto cells = detail::split_csv(lines[r].second);
        if (cells.size() != 3) {
            throw Error(ErrorCode::RaggedRow, where + "expected 3 cells, found " + std::to_string(cells.size()));
        }
        if (cells[0].empty()) throw Error(ErrorCode::ParseError, where + "empty id");
        LabelRow row;
        row.id = std::string(cells[0]);
        row.line = lines[r].first;
        if (!ids.insert(row.id).second) {
            throw Error(ErrorCode::DuplicateId, where + "duplicate id '" + row.id + "'");
        }
        if (!cells[1].empty()) row.conductivity_iacs = detail::parse_real(cells[1], where);
        if (!cells[2].empty()) row.hardness_hv = detail::parse_real(cells[2], where);
        table.push_back(std::move(row));
    }
    return table;
}

inline LabelTable load_labels(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_labels(in, path.string());
}

/// Attaches labels by id. Every label row must name a known feature id;
/// features without a label row keep both properties missing.
inline Dataset join_labels(Dataset ds, const LabelTable& labels, const std::string& source = "labels") {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) index.emplace(ds.samples[i].id(), i);
    for (const auto& row : labels) {
        auto it = index.find(row.id);
        if (it == index.end()) {
            throw Error(ErrorCode::UnmatchedId,
                        detail::at_line(source, row.line) + "label id '" + row.id + "' has no features");
        }
        ds.samples[it->second].conductivity_iacs = row.conductivity_iacs;
        ds.samples[it->second].hardness_hv = row.hardness_hv;
    }
    return ds;
}

inline Dataset load_dataset(const std::filesystem::path& features, const std::filesystem::path& labels) {
    return join_labels(load_features(features), load_labels(labels), labels.string());
}

/// Samples carrying the requested property, in file order.
inline std::vector<LabeledSample> labeled_samples(const Dataset& ds, Property p) {
    std::vector<LabeledSample> out;
    for (const auto& s : ds.samples) {
        if (auto v = s.property(p)) out.push_back({s.features, *v});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Writers

inline std::string features_csv(const std::vector<FeatureVector>& rows) {
    const std::size_t d = rows.empty() ? 0 : rows.front().values.size();
    std::string out = "id";
    for (std::size_t j = 0; j < d; ++j) out += ",f" + std::to_string(j);
    out += '\n';
    for (const auto& r : rows) {
        if (r.values.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
        out += r.id;
        for (double v : r.values) out += ',' + detail::format_real(v);
        out += '\n';
    }
    return out;
}

/// Label file holding one property; the other column is left empty.
inline std::string labels_csv(const std::vector<LabeledSample>& rows, Property p) {
    std::string out = "id,conductivity_iacs,hardness_hv\n";
    for (const auto& r : rows) {
        const std::string v = detail::format_real(r.label);
        out += r.features.id + (p == Property::Conductivity ? "," + v + "," : ",," + v) + '\n';
    }
    return out;
}

inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::random_device rd;
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot move into place '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------------------
// Model persistence

namespace detail {

using nlohmann::json;

inline json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json tree_to_json(const TreeModel& t) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         value = json::array();
    for (const auto& n : t.nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        value.push_back(n.value);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

inline TreeModel tree_from_json(const json& j) {
    TreeModel t;
    const auto& feature = j.at("feature");
    const std::size_t n = feature.size();
    if (n == 0 || j.at("threshold").size() != n || j.at("left").size() != n || j.at("right").size() != n ||
        j.at("value").size() != n) {
        throw Error(ErrorCode::ParseError, "tree arrays are empty or differ in length");
    }
    t.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& node = t.nodes[i];
        node.feature = feature[i].get<int>();
        node.threshold = j["threshold"][i].get<double>();
        node.left = j["left"][i].get<int>();
        node.right = j["right"][i].get<int>();
        node.value = j["value"][i].get<double>();
        if (node.feature >= 0) {
            const auto ok = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
            if (!ok(node.left) || !ok(node.right)) throw Error(ErrorCode::ParseError, "tree child index out of range");
        }
    }
    return t;
}

inline json hyper_to_json(const Hyperparameters& h) {
    return {{"ridge_jitter", h.ridge_jitter},
            {"knn_k", h.knn_k},
            {"max_depth", h.max_depth},
            {"min_leaf", h.min_leaf},
            {"bagging_estimators", h.bagging_estimators},
            {"boosting_stages", h.boosting_stages},
            {"boosting_max_depth", h.boosting_max_depth},
            {"seed", h.seed}};
}

inline Hyperparameters hyper_from_json(const json& j) {
    Hyperparameters h;
    h.ridge_jitter = j.value("ridge_jitter", h.ridge_jitter);
    h.knn_k = j.value("knn_k", h.knn_k);
    h.max_depth = j.value("max_depth", h.max_depth);
    h.min_leaf = j.value("min_leaf", h.min_leaf);
    h.bagging_estimators = j.value("bagging_estimators", h.bagging_estimators);
    h.boosting_stages = j.value("boosting_stages", h.boosting_stages);
    h.boosting_max_depth = j.value("boosting_max_depth", h.boosting_max_depth);
    h.seed = j.value("seed", h.seed);
    return h;
}

} // namespace detail

inline nlohmann::json model_to_json(const FittedRegressor& m) {
    using detail::json;
    if (!m.fitted()) throw Error(ErrorCode::NotFitted, "cannot serialise an unfitted model");
    json state = std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                return {{"weights", s.weights}, {"bias", s.bias}};
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return {{"k", s.k}, {"samples", s.samples}, {"labels", s.labels}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return detail::tree_to_json(s);
            } else if constexpr (std::is_same_v<T, BaggingModel>) {
                json trees = json::array();
                for (const auto& t : s.trees) trees.push_back(detail::tree_to_json(t));
                return {{"trees", trees}};
            } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
                json trees = json::array();
                for (const auto& t : s.trees) trees.push_back(detail::tree_to_json(t));
                return {{"trees", trees}, {"estimator_weights", s.estimator_weights}};
            } else {
                return nullptr;
            }
        },
        m.state());
    return {{"format", kModelFormatTag},
            {"format_version", kModelFormatVersion},
            {"kind", to_string(m.kind())},
            {"name", m.spec().name},
            {"feature_dim", m.feature_dim()},
            {"hyperparameters", detail::hyper_to_json(m.spec().params)},
            {"label_min", detail::real_or_null(m.label_min())},
            {"label_max", detail::real_or_null(m.label_max())},
            {"state", state}};
}

/// Reads either a model document or an exported {"weights", "bias"} head.
inline FittedRegressor model_from_json(const nlohmann::json& j,
                                       std::optional<RegressorKind> expected_kind = std::nullopt,
                                       std::optional<std::size_t> expected_dim = std::nullopt) {
    try {
        if (!j.is_object()) throw Error(ErrorCode::ParseError, "model document must be a JSON object");
        FittedRegressor model;
        if (!j.contains("format") && j.contains("weights")) {
            model = FittedRegressor::from_linear(j.at("weights").get<std::vector<double>>(),
                                                 j.at("bias").get<double>());
        } else {
            if (j.value("format", std::string()) != kModelFormatTag) {
                throw Error(ErrorCode::ParseError, "not a model document");
            }
            const int version = j.at("format_version").get<int>();
            if (version != kModelFormatVersion) {
                throw Error(ErrorCode::VersionMismatch, "unsupported model format version " + std::to_string(version));
            }
            Regressor spec;
            spec.kind = parse_regressor_kind(j.at("kind").get<std::string>());
            spec.params = detail::hyper_from_json(j.at("hyperparameters"));
            spec.name = j.value("name", std::string());
            const std::size_t dim = j.at("feature_dim").get<std::size_t>();
            const auto& st = j.at("state");
            const auto read_bound = [&](const char* key, double fallback) {
                return j.at(key).is_null() ? fallback : j.at(key).get<double>();
            };
            const double lo = read_bound("label_min", -std::numeric_limits<double>::infinity());
            const double hi = read_bound("label_max", std::numeric_limits<double>::infinity());

            ModelState state;
            switch (spec.kind) {
            case RegressorKind::Linear: {
                LinearModel m{st.at("weights").get<std::vector<double>>(), st.at("bias").get<double>()};
                if (m.weights.size() != dim) throw Error(ErrorCode::DimensionMismatch, "weight count != feature_dim");
                state = std::move(m);
                break;
            }
            case RegressorKind::KNN: {
                KnnModel m{st.at("k").get<std::size_t>(), st.at("samples").get<Matrix>(),
                           st.at("labels").get<std::vector<double>>()};
                if (m.k == 0 || m.samples.empty() || m.samples.size() != m.labels.size()) {
                    throw Error(ErrorCode::ParseError, "inconsistent knn state");
                }
                for (const auto& row : m.samples) {
                    if (row.size() != dim) throw Error(ErrorCode::DimensionMismatch, "knn sample width != feature_dim");
                }
                state = std::move(m);
                break;
            }
            case RegressorKind::DecisionTree:
            case RegressorKind::ExtraTree:
                state = detail::tree_from_json(st);
                break;
            case RegressorKind::Bagging: {
                BaggingModel m;
                for (const auto& t : st.at("trees")) m.trees.push_back(detail::tree_from_json(t));
                if (m.trees.empty()) throw Error(ErrorCode::ParseError, "bagging model without trees");
                state = std::move(m);
                break;
            }
            case RegressorKind::AdaBoostR2: {
                AdaBoostModel m;
                for (const auto& t : st.at("trees")) m.trees.push_back(detail::tree_from_json(t));
                m.estimator_weights = st.at("estimator_weights").get<std::vector<double>>();
                if (m.trees.empty() || m.trees.size() != m.estimator_weights.size()) {
                    throw Error(ErrorCode::ParseError, "inconsistent adaboost state");
                }
                state = std::move(m);
                break;
            }
            }
            model = FittedRegressor(spec, dim, std::move(state), lo, hi);
        }
        if (expected_kind && model.kind() != *expected_kind) {
            throw Error(ErrorCode::KindMismatch, "expected a " + std::string(to_string(*expected_kind)) +
                                                     " model, found " + std::string(to_string(model.kind())));
        }
        if (expected_dim && model.feature_dim() != *expected_dim) {
            throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.feature_dim()) +
                                                          " features, data has " + std::to_string(*expected_dim));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed model document: ") + e.what());
    }
}

inline void save_model(const FittedRegressor& m, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(m).dump(2) + "\n");
}

inline FittedRegressor load_model(const std::filesystem::path& path,
                                  std::optional<RegressorKind> expected_kind = std::nullopt,
                                  std::optional<std::size_t> expected_dim = std::nullopt) {
    auto in = detail::open_input(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return model_from_json(j, expected_kind, expected_dim);
}

} // namespace fagc
