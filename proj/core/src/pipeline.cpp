#include "glyphrec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "glyphrec/errors.hpp"
#include "glyphrec/parallel.hpp"
#include "glyphrec/rng.hpp"
#include "glyphrec/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace glyphrec {

namespace {

// Seed stream tags for the independent pipeline stages.
constexpr std::uint64_t kStreamSynth = 1;
constexpr std::uint64_t kStreamSplit = 2;
constexpr std::uint64_t kStreamMlpBase = 16;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

void check_choice(const std::string& value, std::initializer_list<const char*> allowed,
                  const std::string& what) {
    for (const char* a : allowed)
        if (value == a) return;
    std::string msg = what + " '" + value + "' not one of {";
    bool first = true;
    for (const char* a : allowed) {
        if (!first) msg += ", ";
        msg += a;
        first = false;
    }
    throw ConfigInvalid(msg + "}");
}

void validate_config(const PipelineConfig& cfg) {
    check_choice(cfg.classifier, {"mlp-ensemble", "svm", "all"}, "classifier");
    check_choice(cfg.fusion_weights, {"derived", "reference"}, "fusion weights");
    check_choice(cfg.svm_feature,
                 {"concat", "shadow", "chain-histogram", "view-based",
                  "longest-run"},
                 "svm feature");
    if (cfg.out_dir.empty()) throw ConfigInvalid("out_dir must not be empty");
}

}  // namespace

int concat_offset(FeatureKind kind) {
    int offset = 0;
    for (FeatureKind k : kAllFeatureKinds) {
        if (k == kind) return offset;
        offset += dimension(k);
    }
    return offset;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigInvalid("config " + path + ": " + e.what());
    }
    PipelineConfig cfg;
    try {
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.dataset = doc.value("dataset", cfg.dataset);
        cfg.classifier = doc.value("classifier", cfg.classifier);
        cfg.out_dir = doc.value("out_dir", cfg.out_dir);
        if (doc.contains("synthetic")) {
            const auto& s = doc["synthetic"];
            cfg.synth_classes = s.value("classes", cfg.synth_classes);
            cfg.synth_per_class = s.value("per_class", cfg.synth_per_class);
            cfg.synth_noise = s.value("noise", cfg.synth_noise);
        }
        if (doc.contains("split")) {
            const auto& s = doc["split"];
            cfg.train_fraction = s.value("train_fraction", cfg.train_fraction);
            cfg.selection_fraction =
                s.value("selection_fraction", cfg.selection_fraction);
            cfg.stratified = s.value("stratified", cfg.stratified);
        }
        if (doc.contains("mlp")) {
            const auto& s = doc["mlp"];
            cfg.mlp_hidden_dim = s.value("hidden_dim", cfg.mlp_hidden_dim);
            cfg.mlp_epochs = s.value("epochs", cfg.mlp_epochs);
            cfg.mlp_learning_rate = s.value("learning_rate", cfg.mlp_learning_rate);
            cfg.mlp_momentum = s.value("momentum", cfg.mlp_momentum);
        }
        if (doc.contains("fusion")) {
            const auto& s = doc["fusion"];
            cfg.fusion_weights = s.value("weights", cfg.fusion_weights);
            const std::string mode = s.value("mode", std::string("binary"));
            check_choice(mode, {"binary", "soft"}, "fusion mode");
            cfg.weighted_mode = mode == "binary" ? WeightedMode::BinaryVotes
                                                 : WeightedMode::SoftScores;
        }
        if (doc.contains("svm")) {
            const auto& s = doc["svm"];
            cfg.kernel.tag =
                kernel_tag_from_string(s.value("kernel", to_string(cfg.kernel.tag)));
            cfg.kernel.sigma = s.value("sigma", cfg.kernel.sigma);
            cfg.kernel.degree = s.value("degree", cfg.kernel.degree);
            cfg.svm_c = s.value("c", cfg.svm_c);
            if (s.contains("c_grid"))
                cfg.c_grid = s["c_grid"].get<std::vector<double>>();
            cfg.svm_feature = s.value("feature", cfg.svm_feature);
            const std::string scheme =
                s.value("scheme", std::string("one-vs-rest"));
            check_choice(scheme, {"one-vs-rest", "one-vs-one"}, "svm scheme");
            cfg.scheme = scheme == "one-vs-rest" ? MulticlassScheme::OneVsRest
                                                 : MulticlassScheme::OneVsOne;
            cfg.tol = s.value("tol", cfg.tol);
        }
    } catch (const json::exception& e) {
        throw ConfigInvalid("config " + path + ": " + e.what());
    }
    validate_config(cfg);
    return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
    json doc;
    doc["seed"] = cfg.seed;
    doc["dataset"] = cfg.dataset;
    doc["classifier"] = cfg.classifier;
    doc["out_dir"] = cfg.out_dir;
    doc["synthetic"] = {{"classes", cfg.synth_classes},
                        {"per_class", cfg.synth_per_class},
                        {"noise", cfg.synth_noise}};
    doc["split"] = {{"train_fraction", cfg.train_fraction},
                    {"selection_fraction", cfg.selection_fraction},
                    {"stratified", cfg.stratified}};
    doc["mlp"] = {{"hidden_dim", cfg.mlp_hidden_dim},
                  {"epochs", cfg.mlp_epochs},
                  {"learning_rate", cfg.mlp_learning_rate},
                  {"momentum", cfg.mlp_momentum}};
    doc["fusion"] = {
        {"weights", cfg.fusion_weights},
        {"mode", cfg.weighted_mode == WeightedMode::BinaryVotes ? "binary" : "soft"}};
    doc["svm"] = {{"kernel", to_string(cfg.kernel.tag)},
                  {"sigma", cfg.kernel.sigma},
                  {"degree", cfg.kernel.degree},
                  {"c", cfg.svm_c},
                  {"c_grid", cfg.c_grid},
                  {"feature", cfg.svm_feature},
                  {"scheme", to_string(cfg.scheme)},
                  {"tol", cfg.tol}};
    return doc.dump(2) + "\n";
}

BinaryImage preprocess_gray(const GrayImage& img) {
    return normalize(binarize(img));
}

std::array<FeatureVector, 4> extract_all(const BinaryImage& binary) {
    const BinaryImage base = normalize(binary);
    BinaryImage thinned = thin(base);
    if (thinned.object_count() == 0) thinned = base;
    return {extract_shadow(base), extract_chain_histogram(base),
            extract_views(thinned), extract_longest_run(base)};
}

namespace {

struct LoadedDataset {
    std::vector<BinaryImage> images;
    std::vector<int> labels;
    DatasetManifest manifest;
    std::string origin;
};

LoadedDataset acquire_dataset(const PipelineConfig& cfg) {
    LoadedDataset out;
    if (cfg.dataset.empty()) {
        SynthResult synth =
            synth_glyphs(cfg.synth_classes, cfg.synth_per_class, cfg.synth_noise,
                         derive_seed(cfg.seed, kStreamSynth));
        out.images = std::move(synth.images);
        out.labels = std::move(synth.labels);
        out.manifest = std::move(synth.manifest);
        out.origin = "synthetic";
        return out;
    }
    out.manifest = ingest(cfg.dataset);
    out.origin = cfg.dataset;
    const std::size_t n = out.manifest.entries.size();
    out.images.resize(n);
    out.labels.resize(n);
    parallel_for(n, [&](std::size_t i) {
        out.images[i] = binarize(load_pgm(out.manifest.entries[i].path));
        out.labels[i] = out.manifest.entries[i].label;
    });
    return out;
}

std::vector<double> concat_features(const std::array<FeatureVector, 4>& feats) {
    std::vector<double> row;
    row.reserve(kConcatDim);
    for (const auto& f : feats)
        row.insert(row.end(), f.values.begin(), f.values.end());
    return row;
}

std::vector<double> slice_kind(const std::vector<double>& row, FeatureKind kind) {
    const int off = concat_offset(kind);
    return {row.begin() + off, row.begin() + off + dimension(kind)};
}

// Class indices ordered by score, best first, ties to the lowest index.
std::vector<int> top_ranked(const std::vector<double>& scores) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&scores](int a, int b) {
        return scores[a] > scores[b];
    });
    return order;
}

bool in_top5(const std::vector<int>& ranking, int label) {
    const std::size_t k = std::min<std::size_t>(5, ranking.size());
    for (std::size_t i = 0; i < k; ++i)
        if (ranking[i] == label) return true;
    return false;
}

struct PipelineState {
    PipelineConfig cfg;
    LoadedDataset data;
    SplitResult parts;
    ScalerModel scaler;
    std::vector<std::vector<double>> scaled;  // one concatenated row per sample
    ModelBundle bundle;
    bool with_mlp = false;
    bool with_svm = false;
    double expert_train_seconds[4] = {0, 0, 0, 0};
    double svm_train_seconds = 0.0;
    double effective_sigma = 0.0;
    double effective_c = 0.0;
};

std::vector<LabeledSample> gather(const PipelineState& st,
                                  const std::vector<std::size_t>& idx,
                                  FeatureKind kind) {
    std::vector<LabeledSample> out;
    out.reserve(idx.size());
    for (std::size_t i : idx)
        out.push_back({slice_kind(st.scaled[i], kind), st.data.labels[i]});
    return out;
}

std::vector<LabeledSample> gather_svm_rows(const PipelineState& st,
                                           const std::vector<std::size_t>& idx) {
    std::vector<LabeledSample> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        if (st.cfg.svm_feature == "concat")
            out.push_back({st.scaled[i], st.data.labels[i]});
        else
            out.push_back({slice_kind(st.scaled[i],
                                      feature_kind_from_string(st.cfg.svm_feature)),
                           st.data.labels[i]});
    }
    return out;
}

double expert_accuracy(const MlpModel& model,
                       const std::vector<LabeledSample>& samples) {
    if (samples.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& s : samples)
        if (predict(model, s.x).first == s.label) ++correct;
    return static_cast<double>(correct) / samples.size();
}

PipelineState prepare_and_train(const PipelineConfig& cfg) {
    validate_config(cfg);
    PipelineState st;
    st.cfg = cfg;
    st.with_mlp = cfg.classifier != "svm";
    st.with_svm = cfg.classifier != "mlp-ensemble";

    st.data = acquire_dataset(cfg);

    SplitSpec split_spec;
    split_spec.train_fraction = cfg.train_fraction;
    split_spec.selection_fraction = cfg.selection_fraction;
    split_spec.stratified = cfg.stratified;
    split_spec.seed = derive_seed(cfg.seed, kStreamSplit);
    st.parts = split(st.data.manifest, split_spec);

    const std::size_t n = st.data.images.size();
    std::vector<std::vector<double>> raw(n);
    parallel_for(n, [&](std::size_t i) {
        raw[i] = concat_features(extract_all(st.data.images[i]));
    });

    std::vector<std::vector<double>> train_rows;
    train_rows.reserve(st.parts.train.size());
    for (std::size_t i : st.parts.train) train_rows.push_back(raw[i]);
    st.scaler = fit_scaler(train_rows);
    st.scaled.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        st.scaled[i] = apply_scaler(st.scaler, raw[i]);

    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    save_scaler((out / "scaler.bin").string(), st.scaler);
    st.bundle.scaler = st.scaler;

    if (st.with_mlp) {
        parallel_for(4, [&](std::size_t k) {
            const FeatureKind kind = kAllFeatureKinds[k];
            MlpConfig mcfg;
            mcfg.input_dim = dimension(kind);
            mcfg.hidden_dim = cfg.mlp_hidden_dim;
            mcfg.output_dim = kMaxClasses;
            mcfg.learning_rate = cfg.mlp_learning_rate;
            mcfg.momentum = cfg.mlp_momentum;
            mcfg.epochs = cfg.mlp_epochs;
            mcfg.seed = derive_seed(cfg.seed, kStreamMlpBase + k);
            const auto t0 = std::chrono::steady_clock::now();
            st.bundle.experts[k] = train_mlp(gather(st, st.parts.train, kind), mcfg);
            st.expert_train_seconds[k] = seconds_since(t0);
        });

        if (cfg.fusion_weights == "reference") {
            st.bundle.weights = reference_fusion_weights();
        } else {
            const auto& basis =
                st.parts.selection.empty() ? st.parts.train : st.parts.selection;
            std::array<double, 4> acc{};
            for (std::size_t k = 0; k < 4; ++k)
                acc[k] = expert_accuracy(st.bundle.experts[k],
                                         gather(st, basis, kAllFeatureKinds[k]));
            st.bundle.weights = derive_weights(acc);
        }

        for (std::size_t k = 0; k < 4; ++k) {
            const std::string stem =
                "mlp-" + to_string(kAllFeatureKinds[k]);
            save_mlp((out / (stem + ".bin")).string(), st.bundle.experts[k]);
            write_file_atomic((out / (stem + ".json")).string(),
                              mlp_to_json(st.bundle.experts[k]));
        }
        save_fusion_weights((out / "fusion.bin").string(), st.bundle.weights);
    }

    if (st.with_svm) {
        Kernel kernel = cfg.kernel;
        const int dim = cfg.svm_feature == "concat"
                            ? kConcatDim
                            : dimension(feature_kind_from_string(cfg.svm_feature));
        if (kernel.tag == Kernel::Tag::Rbf && kernel.sigma <= 0.0)
            kernel.sigma = default_sigma(dim);
        st.effective_sigma = kernel.sigma;

        const auto train_rows_svm = gather_svm_rows(st, st.parts.train);
        double c = cfg.svm_c;
        const auto t0 = std::chrono::steady_clock::now();
        if (!cfg.c_grid.empty()) {
            if (st.parts.selection.empty())
                throw ConfigInvalid(
                    "svm c_grid search needs a selection split "
                    "(selection_fraction > 0)");
            c = select_c(train_rows_svm, gather_svm_rows(st, st.parts.selection),
                         cfg.c_grid, kernel, cfg.scheme, kMaxClasses, cfg.tol);
        }
        st.effective_c = c;
        st.bundle.svm = train_multiclass(train_rows_svm, cfg.scheme, kernel, c,
                                         kMaxClasses, cfg.tol);
        st.svm_train_seconds = seconds_since(t0);
        save_svm((out / "svm.bin").string(), *st.bundle.svm);
    }

    write_file_atomic((out / "config.json").string(), config_to_json(cfg));
    return st;
}

struct RowMetrics {
    std::size_t n = 0;
    std::size_t top1 = 0;
    std::size_t top5 = 0;
    std::size_t covered = 0;
    std::size_t oracle = 0;
    bool has_oracle = false;
    std::vector<std::vector<int>> confusion;
    std::vector<int> rejected;
    double elapsed_seconds = 0.0;

    explicit RowMetrics(int classes)
        : confusion(static_cast<std::size_t>(classes),
                    std::vector<int>(static_cast<std::size_t>(classes), 0)),
          rejected(static_cast<std::size_t>(classes), 0) {}

    void add(int truth, int pred, bool top5_hit) {
        ++n;
        if (pred == kRejected) {
            ++rejected[truth];
        } else {
            ++covered;
            ++confusion[truth][pred];
            if (pred == truth) ++top1;
        }
        if (top5_hit) ++top5;
    }

    double rate(std::size_t hits) const {
        return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
    }
};

std::array<ExpertDecision, 4> expert_decisions(const PipelineState& st,
                                               std::size_t sample) {
    std::array<ExpertDecision, 4> out;
    for (std::size_t k = 0; k < 4; ++k) {
        const FeatureKind kind = kAllFeatureKinds[k];
        auto [label, scores] =
            predict(st.bundle.experts[k], slice_kind(st.scaled[sample], kind));
        out[k] = ExpertDecision{kind, label, std::move(scores)};
    }
    return out;
}

enum class RowKind { Expert, Unanimous, Any, Weighted, Svm };

RowMetrics evaluate_row(const PipelineState& st, RowKind row, std::size_t expert,
                        const std::vector<std::size_t>& idx) {
    RowMetrics m(kMaxClasses);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i : idx) {
        const int truth = st.data.labels[i];
        switch (row) {
            case RowKind::Expert: {
                const FeatureKind kind = kAllFeatureKinds[expert];
                auto [label, scores] = predict(st.bundle.experts[expert],
                                               slice_kind(st.scaled[i], kind));
                m.add(truth, label, in_top5(top_ranked(scores.values), truth));
                break;
            }
            case RowKind::Unanimous: {
                const auto fused = fuse_unanimous(expert_decisions(st, i));
                m.add(truth, fused.top1, in_top5(fused.ranking, truth));
                break;
            }
            case RowKind::Any: {
                const auto decisions = expert_decisions(st, i);
                const auto fused = fuse_any(decisions);
                const auto candidates = candidate_labels(decisions);
                const bool member = std::binary_search(candidates.begin(),
                                                       candidates.end(), truth);
                m.has_oracle = true;
                if (member) ++m.oracle;
                m.add(truth, fused.top1,
                      member || in_top5(fused.ranking, truth));
                break;
            }
            case RowKind::Weighted: {
                const auto fused = fuse_weighted(expert_decisions(st, i),
                                                 st.bundle.weights,
                                                 st.cfg.weighted_mode);
                m.add(truth, fused.top1, in_top5(fused.ranking, truth));
                break;
            }
            case RowKind::Svm: {
                const std::vector<double> x =
                    st.cfg.svm_feature == "concat"
                        ? st.scaled[i]
                        : slice_kind(st.scaled[i], feature_kind_from_string(
                                                       st.cfg.svm_feature));
                auto [label, scores] = predict(*st.bundle.svm, x);
                m.add(truth, label, in_top5(top_ranked(scores), truth));
                break;
            }
        }
    }
    m.elapsed_seconds = seconds_since(t0);
    return m;
}

std::size_t file_bytes(const fs::path& p) {
    std::error_code ec;
    const auto size = fs::file_size(p, ec);
    return ec ? 0 : static_cast<std::size_t>(size);
}

std::size_t mlp_parameter_count(const MlpModel& m) {
    return m.w1.size() + m.b1.size() + m.w2.size() + m.b2.size();
}

ClassifierEval make_eval(const PipelineState& st, const std::string& name,
                         RowKind row, std::size_t expert) {
    const RowMetrics test = evaluate_row(st, row, expert, st.parts.test);
    const RowMetrics train = evaluate_row(st, row, expert, st.parts.train);

    ClassifierEval eval;
    eval.name = name;
    eval.test_top1 = test.rate(test.top1);
    eval.test_top5 = test.rate(test.top5);
    eval.train_top1 = train.rate(train.top1);
    eval.train_top5 = train.rate(train.top5);
    eval.test_coverage = test.rate(test.covered);
    eval.train_coverage = train.rate(train.covered);
    if (test.has_oracle) {
        eval.test_oracle_top1 = test.rate(test.oracle);
        eval.train_oracle_top1 = train.rate(train.oracle);
    }
    eval.test_confusion = test.confusion;
    eval.test_rejected = test.rejected;
    eval.predict_us_per_sample =
        test.n == 0 ? 0.0 : test.elapsed_seconds * 1e6 / test.n;

    const fs::path out(st.cfg.out_dir);
    switch (row) {
        case RowKind::Expert:
            eval.parameter_count = mlp_parameter_count(st.bundle.experts[expert]);
            eval.model_bytes = file_bytes(
                out / ("mlp-" + to_string(kAllFeatureKinds[expert]) + ".bin"));
            eval.train_seconds = st.expert_train_seconds[expert];
            break;
        case RowKind::Unanimous:
        case RowKind::Any:
        case RowKind::Weighted: {
            for (std::size_t k = 0; k < 4; ++k) {
                eval.parameter_count += mlp_parameter_count(st.bundle.experts[k]);
                eval.model_bytes += file_bytes(
                    out / ("mlp-" + to_string(kAllFeatureKinds[k]) + ".bin"));
                eval.train_seconds += st.expert_train_seconds[k];
            }
            eval.model_bytes += file_bytes(out / "fusion.bin");
            break;
        }
        case RowKind::Svm:
            eval.parameter_count = st.bundle.svm->support_vector_count();
            eval.model_bytes = file_bytes(out / "svm.bin");
            eval.train_seconds = st.svm_train_seconds;
            break;
    }
    return eval;
}

}  // namespace

ModelBundle train_models(const PipelineConfig& cfg) {
    return prepare_and_train(cfg).bundle;
}

EvalReport run_pipeline(const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineState st = prepare_and_train(cfg);

    EvalReport report;
    report.seed = cfg.seed;
    report.num_classes = kMaxClasses;
    report.dataset_origin = st.data.origin;
    report.train_count = st.parts.train.size();
    report.selection_count = st.parts.selection.size();
    report.test_count = st.parts.test.size();
    report.weights_used = st.bundle.weights;

    if (st.with_mlp) {
        for (std::size_t k = 0; k < 4; ++k)
            report.classifiers.push_back(make_eval(
                st, "expert-" + to_string(kAllFeatureKinds[k]), RowKind::Expert, k));
        report.classifiers.push_back(
            make_eval(st, "ensemble-unanimous", RowKind::Unanimous, 0));
        report.classifiers.push_back(make_eval(st, "ensemble-any", RowKind::Any, 0));
        report.classifiers.push_back(
            make_eval(st, "ensemble-weighted", RowKind::Weighted, 0));
    }
    if (st.with_svm) {
        report.svm_feature = cfg.svm_feature;
        std::string desc = to_string(cfg.kernel.tag);
        if (cfg.kernel.tag == Kernel::Tag::Rbf) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "rbf(sigma=%g)", st.effective_sigma);
            desc = buf;
        } else if (cfg.kernel.tag == Kernel::Tag::Poly) {
            desc = "poly(degree=" + std::to_string(cfg.kernel.degree) + ")";
        }
        report.kernel_desc = desc;
        report.svm_c = st.effective_c;
        report.classifiers.push_back(make_eval(st, "svm", RowKind::Svm, 0));
    }

    const fs::path out(cfg.out_dir);
    save_report(report, (out / "report.json").string());

    json timings;
    timings["total_seconds"] = seconds_since(t0);
    auto& rows = timings["classifiers"] = json::array();
    for (const auto& c : report.classifiers)
        rows.push_back({{"name", c.name},
                        {"train_seconds", c.train_seconds},
                        {"predict_us_per_sample", c.predict_us_per_sample}});
    write_file_atomic((out / "timings.json").string(), timings.dump(2) + "\n");
    return report;
}

ModelBundle load_bundle(const std::string& dir, bool need_svm, bool need_mlp) {
    const fs::path out(dir);
    ModelBundle bundle;
    bundle.scaler = load_scaler((out / "scaler.bin").string());
    if (need_mlp) {
        for (std::size_t k = 0; k < 4; ++k)
            bundle.experts[k] = load_mlp(
                (out / ("mlp-" + to_string(kAllFeatureKinds[k]) + ".bin")).string());
        bundle.weights = load_fusion_weights((out / "fusion.bin").string());
    }
    if (need_svm) bundle.svm = load_svm((out / "svm.bin").string());
    return bundle;
}

void save_report(const EvalReport& report, const std::string& path) {
    json doc;
    doc["seed"] = report.seed;
    doc["num_classes"] = report.num_classes;
    doc["dataset"] = report.dataset_origin;
    doc["counts"] = {{"train", report.train_count},
                     {"selection", report.selection_count},
                     {"test", report.test_count}};
    json weights;
    for (FeatureKind k : kAllFeatureKinds)
        weights[to_string(k)] = report.weights_used.of(k);
    doc["fusion_weights"] = weights;
    doc["svm"] = {{"feature", report.svm_feature},
                  {"kernel", report.kernel_desc},
                  {"c", report.svm_c}};
    auto& rows = doc["classifiers"] = json::array();
    for (const auto& c : report.classifiers) {
        json row;
        row["name"] = c.name;
        row["test"] = {{"top1", c.test_top1},
                       {"top5", c.test_top5},
                       {"coverage", c.test_coverage}};
        row["train"] = {{"top1", c.train_top1},
                        {"top5", c.train_top5},
                        {"coverage", c.train_coverage}};
        if (c.test_oracle_top1 >= 0.0) {
            row["test"]["oracle_top1"] = c.test_oracle_top1;
            row["train"]["oracle_top1"] = c.train_oracle_top1;
        }
        row["parameters"] = c.parameter_count;
        row["storage_bytes"] = c.model_bytes;
        row["confusion"] = c.test_confusion;
        row["rejected"] = c.test_rejected;
        rows.push_back(std::move(row));
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

EvalReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("report " + path + ": " + e.what());
    }
    EvalReport report;
    try {
        report.seed = doc.at("seed").get<std::uint64_t>();
        report.num_classes = doc.at("num_classes").get<int>();
        report.dataset_origin = doc.at("dataset").get<std::string>();
        report.train_count = doc.at("counts").at("train").get<std::size_t>();
        report.selection_count = doc.at("counts").at("selection").get<std::size_t>();
        report.test_count = doc.at("counts").at("test").get<std::size_t>();
        for (FeatureKind k : kAllFeatureKinds)
            report.weights_used.weights[static_cast<int>(k)] =
                doc.at("fusion_weights").at(to_string(k)).get<double>();
        report.svm_feature = doc.at("svm").at("feature").get<std::string>();
        report.kernel_desc = doc.at("svm").at("kernel").get<std::string>();
        report.svm_c = doc.at("svm").at("c").get<double>();
        for (const auto& row : doc.at("classifiers")) {
            ClassifierEval c;
            c.name = row.at("name").get<std::string>();
            c.test_top1 = row.at("test").at("top1").get<double>();
            c.test_top5 = row.at("test").at("top5").get<double>();
            c.test_coverage = row.at("test").at("coverage").get<double>();
            c.train_top1 = row.at("train").at("top1").get<double>();
            c.train_top5 = row.at("train").at("top5").get<double>();
            c.train_coverage = row.at("train").at("coverage").get<double>();
            if (row.at("test").contains("oracle_top1")) {
                c.test_oracle_top1 = row.at("test").at("oracle_top1").get<double>();
                c.train_oracle_top1 =
                    row.at("train").at("oracle_top1").get<double>();
            }
            c.parameter_count = row.at("parameters").get<std::size_t>();
            c.model_bytes = row.at("storage_bytes").get<std::size_t>();
            c.test_confusion =
                row.at("confusion").get<std::vector<std::vector<int>>>();
            c.test_rejected = row.at("rejected").get<std::vector<int>>();
            report.classifiers.push_back(std::move(c));
        }
    } catch (const json::exception& e) {
        throw FormatError("report " + path + ": " + e.what());
    }
    return report;
}

namespace {

std::string percent(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return buf;
}

}  // namespace

std::string render_report(const EvalReport& report, bool machine_rows) {
    std::ostringstream out;
    if (machine_rows) {
        out << "classifier,split,metric,value\n";
        for (const auto& c : report.classifiers) {
            auto emit = [&](const char* split, const char* metric, double v) {
                out << c.name << ',' << split << ',' << metric << ',' << v << "\n";
            };
            emit("test", "top1", c.test_top1);
            emit("test", "top5", c.test_top5);
            emit("test", "coverage", c.test_coverage);
            if (c.test_oracle_top1 >= 0.0)
                emit("test", "oracle_top1", c.test_oracle_top1);
            emit("train", "top1", c.train_top1);
            emit("train", "top5", c.train_top5);
            emit("train", "coverage", c.train_coverage);
            if (c.train_oracle_top1 >= 0.0)
                emit("train", "oracle_top1", c.train_oracle_top1);
            out << c.name << ",model,parameters," << c.parameter_count << "\n";
            out << c.name << ",model,storage_bytes," << c.model_bytes << "\n";
        }
        return out.str();
    }

    out << "dataset: " << report.dataset_origin << "  (train " << report.train_count
        << ", selection " << report.selection_count << ", test "
        << report.test_count << ", classes " << report.num_classes << ")\n";
    if (!report.svm_feature.empty())
        out << "svm: feature=" << report.svm_feature << " kernel="
            << report.kernel_desc << " c=" << report.svm_c << "\n";
    out << "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-22s %10s %10s %11s %11s %9s %10s %12s\n",
                  "classifier", "test top1", "test top5", "train top1",
                  "train top5", "coverage", "params/SVs", "storage");
    out << line;
    out << std::string(101, '-') << "\n";
    for (const auto& c : report.classifiers) {
        std::snprintf(line, sizeof(line),
                      "%-22s %10s %10s %11s %11s %9s %10zu %10zu B\n",
                      c.name.c_str(), percent(c.test_top1).c_str(),
                      percent(c.test_top5).c_str(), percent(c.train_top1).c_str(),
                      percent(c.train_top5).c_str(),
                      percent(c.test_coverage).c_str(), c.parameter_count,
                      c.model_bytes);
        out << line;
        if (c.test_oracle_top1 >= 0.0) {
            std::snprintf(line, sizeof(line),
                          "%-22s %10s %10s (set-membership accounting)\n",
                          "  any-vote oracle", percent(c.test_oracle_top1).c_str(),
                          percent(c.train_oracle_top1).c_str());
            out << line;
        }
    }
    return out.str();
}

}  // namespace glyphrec
