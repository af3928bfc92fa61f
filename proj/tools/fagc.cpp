/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

// fagc: command-line front end.
//
//   fagc augment      --features F --labels L --property P --teacher T --k-generated K --out DIR
//   fagc evaluate     ... --model M [--model M2 | --model all]
//   fagc sweep        ... [--k-values 10,20,...]
//   fagc teacher-grid ... --teacher T [--teacher T2 | --teacher all]
//   fagc heatmap      --patches P (--model-file M | --features F --labels L --property P --model M)
//   fagc embed        ... --teacher T --k-generated K
//   fagc synth        --out DIR   (curve benchmark as features/labels/patches CSV)
//
// Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fagc/analysis.hpp"
#include "fagc/augment.hpp"
#include "fagc/datastore.hpp"
#include "fagc/error.hpp"
#include "fagc/evalharness.hpp"
#include "fagc/regressors.hpp"
#include "fagc/report_io.hpp"
#include "fagc/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void log(const std::string& msg) { std::cerr << "fagc: " << msg << '\n'; }

struct RunConfig {
    std::string config;
    std::string features;
    std::string labels;
    std::string property;
    std::vector<std::string> models;
    std::vector<std::string> teachers;
    std::size_t k_generated = 100;
    std::vector<std::size_t> k_values;
    std::size_t folds = fagc::kDefaultFolds;
    std::size_t teacher_folds = 5;
    std::string protocol = "out-of-fold";
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string experiment_id;
    std::string patches;
    std::string model_file;
    std::size_t rows = fagc::kDefaultPatchRows;
    std::size_t cols = fagc::kDefaultPatchCols;
    bool normalize_patches = false;
    std::size_t samples = 18;
    std::size_t dim = 32;
    double noise = 0.01;
};

// Options that may also come from the JSON config; a flag given on the
// command line always wins.
struct Binding {
    CLI::Option* option;
    std::string key;
    std::function<void(const json&)> assign;
};

template <class T>
Binding bind_option(CLI::App& app, const std::string& flag, const std::string& key, T& target, const std::string& help) {
    CLI::Option* opt = app.add_option(flag, target, help);
    return {opt, key, [&target](const json& v) { target = v.get<T>(); }};
}

void add_list(CLI::App& app, std::vector<Binding>& b, const std::string& flag, const std::string& key,
              std::vector<std::string>& target, const std::string& help) {
    CLI::Option* opt = app.add_option(flag, target, help)->delimiter(',');
    b.push_back({opt, key, [&target](const json& v) {
                     target = v.is_array() ? v.get<std::vector<std::string>>()
                                           : std::vector<std::string>{v.get<std::string>()};
                 }});
}

void apply_config(const RunConfig& cfg, const std::vector<Binding>& bindings) {
    if (cfg.config.empty()) return;
    std::ifstream in(cfg.config);
    if (!in) throw fagc::Error(fagc::ErrorCode::IoError, "cannot open config '" + cfg.config + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw fagc::Error(fagc::ErrorCode::ParseError, cfg.config + ": " + e.what());
    }
    if (!doc.is_object()) throw fagc::Error(fagc::ErrorCode::ParseError, cfg.config + ": expected a JSON object");
    std::set<std::string> known;
    for (const auto& b : bindings) {
        known.insert(b.key);
        if (b.option->count() > 0 || !doc.contains(b.key)) continue;
        try {
            b.assign(doc.at(b.key));
        } catch (const json::exception& e) {
            throw fagc::Error(fagc::ErrorCode::ParseError, cfg.config + ": bad value for '" + b.key + "'");
        }
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known.count(it.key())) log("ignoring unknown config key '" + it.key() + "'");
    }
}

std::vector<fagc::Regressor> parse_models(const std::vector<std::string>& names, const std::string& what,
                                          std::uint64_t seed) {
    std::vector<fagc::Regressor> out;
    for (const auto& n : names) {
        if (n == "all") {
            for (auto k : fagc::kAllRegressorKinds) out.push_back({k, {}, {}});
            continue;
        }
        try {
            out.push_back({fagc::parse_regressor_kind(n), {}, {}});
        } catch (const fagc::Error& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("at least one " + what + " is required");
    for (auto& r : out) r.params.seed = seed;
    return out;
}

fagc::Property require_property(const RunConfig& cfg) {
    if (cfg.property.empty()) throw UsageError("--property is required (conductivity or hardness)");
    try {
        return fagc::parse_property(cfg.property);
    } catch (const fagc::Error& e) {
        throw UsageError(e.what());
    }
}

fagc::TeacherProtocol parse_protocol(const std::string& s) {
    if (s == "out-of-fold" || s == "oof") return fagc::TeacherProtocol::OutOfFold;
    if (s == "in-fold") return fagc::TeacherProtocol::InFold;
    throw UsageError("--protocol must be out-of-fold or in-fold");
}

std::vector<fagc::LabeledSample> load_training(const RunConfig& cfg) {
    if (cfg.features.empty() || cfg.labels.empty()) throw UsageError("--features and --labels are required");
    const fagc::Property p = require_property(cfg);
    const fagc::Dataset ds = fagc::load_dataset(cfg.features, cfg.labels);
    auto data = fagc::labeled_samples(ds, p);
    if (data.empty()) {
        throw fagc::Error(fagc::ErrorCode::EmptyTrainingSet,
                          "no samples carry " + std::string(fagc::column_name(p)));
    }
    log("loaded " + std::to_string(data.size()) + " labelled samples, D = " + std::to_string(ds.feature_dim));
    return data;
}

fagc::HarnessOptions harness_options(const RunConfig& cfg, const std::string& default_id) {
    fagc::HarnessOptions h;
    h.experiment_id = cfg.experiment_id.empty() ? default_id : cfg.experiment_id;
    h.k_folds = cfg.folds;
    h.seed = cfg.seed;
    h.protocol = parse_protocol(cfg.protocol);
    h.teacher_folds = cfg.teacher_folds;
    return h;
}

json run_metadata(const RunConfig& cfg) {
    return {{"property", cfg.property}, {"features", cfg.features}, {"labels", cfg.labels},
            {"protocol", cfg.protocol}, {"teacher_folds", cfg.teacher_folds}};
}

void require_positive_k(std::size_t k) {
    if (k == 0) throw UsageError("--k-generated must be positive");
}

// Collected outputs, written together once the command has succeeded.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

    void commit() {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw fagc::Error(fagc::ErrorCode::IoError, "cannot create '" + dir_.string() + "'");
        std::vector<fs::path> written;
        try {
            for (const auto& [name, content] : files_) {
                fagc::write_file_atomic(dir_ / name, content);
                written.push_back(dir_ / name);
            }
        } catch (...) {
            for (const auto& p : written) fs::remove(p, ec);
            throw;
        }
        for (const auto& p : written) log("wrote " + p.string());
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

void cmd_augment(const RunConfig& cfg) {
    require_positive_k(cfg.k_generated);
    const auto data = load_training(cfg);
    const auto teacher = parse_models(cfg.teachers.empty() ? std::vector<std::string>{"dt"} : cfg.teachers,
                                      "teacher", cfg.seed);
    if (teacher.size() != 1) throw UsageError("augment takes exactly one --teacher");
    const auto aug = fagc::build_augmented(data, cfg.k_generated, teacher.front(),
                                           {parse_protocol(cfg.protocol), cfg.teacher_folds, cfg.seed});
    log("endpoints " + aug.endpoint_first + ", " + aug.endpoint_second + "; theta " +
        fagc::detail::format_real(aug.theta));

    std::vector<fagc::FeatureVector> feats;
    for (const auto& g : aug.generated) feats.push_back(g.features);
    Outputs out(cfg.out);
    out.add("generated_features.csv", fagc::features_csv(feats));
    out.add("generated_labels.csv", fagc::labels_csv(aug.generated, fagc::parse_property(cfg.property)));
    out.commit();
}

void cmd_evaluate(const RunConfig& cfg) {
    require_positive_k(cfg.k_generated);
    const auto data = load_training(cfg);
    const auto models = parse_models(cfg.models, "--model", cfg.seed);
    const auto teacher = parse_models(cfg.teachers.empty() ? std::vector<std::string>{"dt"} : cfg.teachers,
                                      "teacher", cfg.seed);
    if (teacher.size() != 1) throw UsageError("evaluate takes exactly one --teacher");
    const auto report = fagc::run_teacher_grid(data, teacher, models, cfg.k_generated,
                                               harness_options(cfg, "evaluate-" + cfg.property));
    Outputs out(cfg.out);
    out.add("report.csv", fagc::report_csv(report));
    out.add("report.json", fagc::report_json(report, run_metadata(cfg)).dump(2) + "\n");
    out.commit();
}

void cmd_sweep(const RunConfig& cfg) {
    const auto data = load_training(cfg);
    const auto models = parse_models(cfg.models, "--model", cfg.seed);
    const auto teacher = parse_models(cfg.teachers.empty() ? std::vector<std::string>{"dt"} : cfg.teachers,
                                      "teacher", cfg.seed);
    if (teacher.size() != 1) throw UsageError("sweep takes exactly one --teacher");
    const auto counts = cfg.k_values.empty() ? fagc::kDefaultSweep : cfg.k_values;
    for (auto k : counts) require_positive_k(k);
    const auto options = harness_options(cfg, "sweep-" + cfg.property);
    const auto report = fagc::run_k_sweep(data, models, counts, teacher.front(), options);
    Outputs out(cfg.out);
    out.add("sweep.csv", fagc::aggregate_csv(options.experiment_id, fagc::aggregate(report)));
    out.add("sweep_folds.csv", fagc::report_csv(report));
    out.add("sweep.json", fagc::report_json(report, run_metadata(cfg)).dump(2) + "\n");
    out.commit();
}

void cmd_teacher_grid(const RunConfig& cfg) {
    require_positive_k(cfg.k_generated);
    const auto data = load_training(cfg);
    const auto teachers = parse_models(cfg.teachers, "--teacher", cfg.seed);
    const auto students = parse_models(cfg.models.empty() ? cfg.teachers : cfg.models, "--model", cfg.seed);
    const auto options = harness_options(cfg, "teacher-grid-" + cfg.property);
    const auto report = fagc::run_teacher_grid(data, teachers, students, cfg.k_generated, options);
    Outputs out(cfg.out);
    out.add("teacher_grid.csv", fagc::aggregate_csv(options.experiment_id, fagc::aggregate(report)));
    out.add("teacher_grid_folds.csv", fagc::report_csv(report));
    out.add("teacher_grid.json", fagc::report_json(report, run_metadata(cfg)).dump(2) + "\n");
    out.commit();
}

void cmd_heatmap(const RunConfig& cfg) {
    if (cfg.patches.empty()) throw UsageError("--patches is required");
    if (cfg.rows == 0 || cfg.cols == 0) throw UsageError("--rows and --cols must be positive");
    const fagc::Dataset patch_set = fagc::load_features(cfg.patches);
    std::vector<fagc::FeatureVector> patches = patch_set.features();

    Outputs out(cfg.out);
    fagc::FittedRegressor model;
    bool normalize = cfg.normalize_patches;
    std::string kind = cfg.property;
    if (!cfg.model_file.empty()) {
        model = fagc::load_model(cfg.model_file, std::nullopt, patch_set.feature_dim);
    } else {
        // Trained here the same way the harness trains students: on
        // pre-shape normalised features, optionally augmented.
        const auto data = load_training(cfg);
        const auto spec = parse_models(cfg.models, "--model", cfg.seed);
        if (spec.size() != 1) throw UsageError("heatmap takes exactly one --model");
        fagc::Matrix x;
        std::vector<double> y;
        if (!cfg.teachers.empty()) {
            require_positive_k(cfg.k_generated);
            const auto teacher = parse_models(cfg.teachers, "teacher", cfg.seed);
            if (teacher.size() != 1) throw UsageError("heatmap takes at most one --teacher");
            const auto aug = fagc::build_augmented(data, cfg.k_generated, teacher.front(),
                                                   {parse_protocol(cfg.protocol), cfg.teacher_folds, cfg.seed});
            x = aug.features();
            y = aug.labels();
        } else {
            for (const auto& s : data) {
                x.push_back(fagc::normalize_feature(s.features).values);
                y.push_back(s.label);
            }
        }
        model = fagc::fit(spec.front(), x, y);
        normalize = true;
        out.add("model.json", fagc::model_to_json(model).dump(2) + "\n");
    }
    if (normalize) {
        for (auto& p : patches) p = fagc::normalize_feature(p);
    }
    const auto grid = fagc::patch_contribution_map(patches, model, cfg.rows, cfg.cols, kind);
    out.add("heatmap.csv", fagc::heatmap_csv(grid));
    out.add("heatmap.pgm", fagc::heatmap_pgm(grid));
    out.commit();
}

void cmd_embed(const RunConfig& cfg) {
    require_positive_k(cfg.k_generated);
    const auto data = load_training(cfg);
    const auto teacher = parse_models(cfg.teachers.empty() ? std::vector<std::string>{"dt"} : cfg.teachers,
                                      "teacher", cfg.seed);
    if (teacher.size() != 1) throw UsageError("embed takes exactly one --teacher");

    // Fold 0 of the same split the harness uses.
    const auto folds = fagc::kfold_split(data.size(), cfg.folds, cfg.seed);
    std::vector<fagc::LabeledSample> train;
    for (auto i : folds.front().train) train.push_back(data[i]);
    const auto aug = fagc::build_augmented(train, cfg.k_generated, teacher.front(),
                                           {parse_protocol(cfg.protocol), cfg.teacher_folds,
                                            fagc::derive_seed(cfg.seed, 0)});

    std::vector<fagc::EmbeddingRow> rows;
    fagc::Matrix points;
    for (const auto& s : aug.originals) {
        const bool endpoint = s.features.id == aug.endpoint_first || s.features.id == aug.endpoint_second;
        rows.push_back({s.features.id, 0.0, 0.0, endpoint ? "endpoint" : "train"});
        points.push_back(s.features.values);
    }
    for (auto i : folds.front().test) {
        rows.push_back({data[i].features.id, 0.0, 0.0, "test"});
        points.push_back(fagc::normalize_feature(data[i].features).values);
    }
    for (const auto& g : aug.generated) {
        rows.push_back({g.features.id, 0.0, 0.0, "generated"});
        points.push_back(g.features.values);
    }
    const auto xy = fagc::embed_2d(points);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].x = xy[i].first;
        rows[i].y = xy[i].second;
    }
    Outputs out(cfg.out);
    out.add("embedding.csv", fagc::embedding_csv(rows));
    out.commit();
}

void cmd_synth(const RunConfig& cfg) {
    if (cfg.samples < 2 || cfg.dim < 3) throw UsageError("--samples must be >= 2 and --dim >= 3");
    fagc::CurveBenchmarkOptions opt;
    opt.samples = cfg.samples;
    opt.dim = cfg.dim;
    opt.noise = cfg.noise;
    opt.seed = cfg.seed;
    const auto bench = fagc::make_curve_benchmark(opt);

    std::vector<fagc::FeatureVector> feats;
    std::string labels = "id,conductivity_iacs,hardness_hv\n";
    for (std::size_t i = 0; i < bench.samples.size(); ++i) {
        const auto& s = bench.samples[i];
        feats.push_back(s.features);
        const double hardness = 150.0 + 100.0 * bench.parameter[i];
        labels += s.features.id + ',' + fagc::detail::format_real(s.label) + ',' +
                  fagc::detail::format_real(hardness) + '\n';
    }

    // Same basis (same seed), evenly spread along the curve.
    opt.samples = cfg.rows * cfg.cols;
    opt.jitter = 0.0;
    std::vector<fagc::FeatureVector> patches;
    for (auto& s : fagc::make_curve_benchmark(opt).samples) {
        s.features.id = "patch" + s.features.id.substr(1);
        patches.push_back(std::move(s.features));
    }

    Outputs out(cfg.out);
    out.add("features.csv", fagc::features_csv(feats));
    out.add("labels.csv", labels);
    out.add("patches.csv", fagc::features_csv(patches));
    out.commit();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature augmentation on geodesic curves for small-sample regression"};
    app.require_subcommand(1);
    RunConfig cfg;

    struct Command {
        CLI::App* app;
        std::vector<Binding> bindings;
        void (*run)(const RunConfig&);
    };
    std::vector<Command> commands;
    commands.reserve(8);

    const auto make = [&](const std::string& name, const std::string& help, void (*run)(const RunConfig&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        std::vector<Binding> b;
        sub->add_option("--config", cfg.config, "JSON file with the same keys as the flags");
        b.push_back(bind_option(*sub, "--seed", "seed", cfg.seed, "root random seed"));
        b.push_back(bind_option(*sub, "--out", "out", cfg.out, "output directory"));
        commands.push_back({sub, std::move(b), run});
        return &commands.back();
    };
    const auto data_flags = [&](Command* c) {
        auto& s = *c->app;
        c->bindings.push_back(bind_option(s, "--features", "features", cfg.features, "features CSV"));
        c->bindings.push_back(bind_option(s, "--labels", "labels", cfg.labels, "labels CSV"));
        c->bindings.push_back(bind_option(s, "--property", "property", cfg.property, "conductivity or hardness"));
        c->bindings.push_back(
            bind_option(s, "--protocol", "protocol", cfg.protocol, "teacher protocol: out-of-fold or in-fold"));
        c->bindings.push_back(
            bind_option(s, "--teacher-folds", "teacher_folds", cfg.teacher_folds, "inner folds for out-of-fold teachers"));
    };
    const auto harness_flags = [&](Command* c) {
        auto& s = *c->app;
        c->bindings.push_back(bind_option(s, "--folds", "folds", cfg.folds, "cross-validation folds"));
        c->bindings.push_back(
            bind_option(s, "--experiment-id", "experiment_id", cfg.experiment_id, "experiment id in reports"));
    };
    const auto k_flag = [&](Command* c) {
        c->bindings.push_back(
            bind_option(*c->app, "--k-generated", "k_generated", cfg.k_generated, "generated features per fold"));
    };

    Command* c = make("augment", "write generated features and pseudo-labels", cmd_augment);
    data_flags(c);
    k_flag(c);
    add_list(*c->app, c->bindings, "--teacher", "teacher", cfg.teachers, "teacher model kind");

    c = make("evaluate", "cross-validate models with and without augmentation", cmd_evaluate);
    data_flags(c);
    harness_flags(c);
    k_flag(c);
    add_list(*c->app, c->bindings, "--model", "model", cfg.models, "student model kinds, or all");
    add_list(*c->app, c->bindings, "--teacher", "teacher", cfg.teachers, "teacher model kind");

    c = make("sweep", "cross-validate over several generated-feature counts", cmd_sweep);
    data_flags(c);
    harness_flags(c);
    add_list(*c->app, c->bindings, "--model", "model", cfg.models, "student model kinds, or all");
    add_list(*c->app, c->bindings, "--teacher", "teacher", cfg.teachers, "teacher model kind");
    {
        CLI::Option* opt = c->app->add_option("--k-values", cfg.k_values, "generated counts")->delimiter(',');
        c->bindings.push_back({opt, "k_values", [&cfg](const json& v) {
                                   cfg.k_values = v.get<std::vector<std::size_t>>();
                               }});
    }

    c = make("teacher-grid", "every teacher x student pair plus a baseline", cmd_teacher_grid);
    data_flags(c);
    harness_flags(c);
    k_flag(c);
    add_list(*c->app, c->bindings, "--model", "model", cfg.models, "student kinds (default: the teachers)");
    add_list(*c->app, c->bindings, "--teacher", "teacher", cfg.teachers, "teacher kinds, or all");

    c = make("heatmap", "per-patch prediction grid", cmd_heatmap);
    data_flags(c);
    k_flag(c);
    add_list(*c->app, c->bindings, "--model", "model", cfg.models, "model kind to fit");
    add_list(*c->app, c->bindings, "--teacher", "teacher", cfg.teachers, "augment before fitting");
    c->bindings.push_back(bind_option(*c->app, "--patches", "patches", cfg.patches, "patch features CSV"));
    c->bindings.push_back(bind_option(*c->app, "--model-file", "model_file", cfg.model_file, "model.json or head.json"));
    c->bindings.push_back(bind_option(*c->app, "--rows", "rows", cfg.rows, "grid rows"));
    c->bindings.push_back(bind_option(*c->app, "--cols", "cols", cfg.cols, "grid columns"));
    {
        CLI::Option* opt =
            c->app->add_flag("--normalize-patches", cfg.normalize_patches, "pre-shape normalise patches first");
        c->bindings.push_back({opt, "normalize_patches", [&cfg](const json& v) {
                                   cfg.normalize_patches = v.get<bool>();
                               }});
    }

    c = make("embed", "2-D embedding of fold 0 with generated points", cmd_embed);
    data_flags(c);
    harness_flags(c);
    k_flag(c);
    add_list(*c->app, c->bindings, "--teacher", "teacher", cfg.teachers, "teacher model kind");

    c = make("synth", "write a synthetic curve benchmark", cmd_synth);
    c->bindings.push_back(bind_option(*c->app, "--samples", "samples", cfg.samples, "sample count"));
    c->bindings.push_back(bind_option(*c->app, "--dim", "dim", cfg.dim, "feature dimension"));
    c->bindings.push_back(bind_option(*c->app, "--noise", "noise", cfg.noise, "per-coordinate noise"));
    c->bindings.push_back(bind_option(*c->app, "--rows", "rows", cfg.rows, "patch grid rows"));
    c->bindings.push_back(bind_option(*c->app, "--cols", "cols", cfg.cols, "patch grid columns"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (const auto& cmd : commands) {
        if (!cmd.app->parsed()) continue;
        try {
            apply_config(cfg, cmd.bindings);
            cmd.run(cfg);
            return 0;
        } catch (const UsageError& e) {
            log(std::string("usage: ") + e.what());
            return 2;
        } catch (const fagc::Error& e) {
            if (e.code() == fagc::ErrorCode::ParamOutOfRange) {
                log(std::string("usage: ") + e.what());
                return 2;
            }
            log(e.what());
            return 1;
        } catch (const std::exception& e) {
            log(e.what());
            return 1;
        }
    }
    return 2;
}
