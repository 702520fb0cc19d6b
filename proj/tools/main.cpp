#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glyphrec/dataset.hpp"
#include "glyphrec/ensemble.hpp"
#include "glyphrec/errors.hpp"
#include "glyphrec/image.hpp"
#include "glyphrec/pipeline.hpp"
#include "glyphrec/serialize.hpp"

namespace fs = std::filesystem;
using namespace glyphrec;

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string classifier;
    std::string kernel;
    std::string dataset;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON pipeline config");
    cmd->add_option("--seed", flags.seed, "master RNG seed")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--classifier", flags.classifier,
                    "classifiers to train: mlp-ensemble, svm, or all")
        ->check(CLI::IsMember({"mlp-ensemble", "svm", "all"}));
    cmd->add_option("--kernel", flags.kernel, "SVM kernel: linear, rbf, or poly")
        ->check(CLI::IsMember({"linear", "rbf", "poly"}));
    cmd->add_option("--dataset", flags.dataset,
                    "dataset directory or manifest (empty: synthetic)");
    cmd->add_option("--out", flags.out_dir, "output directory for models/reports");
}

PipelineConfig resolve_config(const CommonFlags& flags) {
    PipelineConfig cfg;
    if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
    if (flags.seed_set) cfg.seed = flags.seed;
    if (!flags.classifier.empty()) cfg.classifier = flags.classifier;
    if (!flags.kernel.empty()) cfg.kernel.tag = kernel_tag_from_string(flags.kernel);
    if (!flags.dataset.empty()) cfg.dataset = flags.dataset;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    return cfg;
}

int cmd_ingest(const std::string& root, const std::string& out_path) {
    DatasetManifest manifest = ingest(root);
    std::map<int, std::size_t> per_class;
    for (const auto& e : manifest.entries) ++per_class[e.label];
    std::printf("%zu samples, %zu classes\n", manifest.entries.size(),
                per_class.size());
    for (const auto& [label, count] : per_class)
        std::printf("  %s: %zu\n", manifest.class_names[label].c_str(), count);
    if (!out_path.empty()) {
        save_manifest(manifest, out_path);
        std::printf("manifest written to %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_synth(int classes, int per_class, double noise, std::uint64_t seed,
              const std::string& out_dir) {
    SynthResult synth = synth_glyphs(classes, per_class, noise, seed);
    write_synth_dataset(synth, out_dir);
    std::printf("wrote %zu glyphs (%d classes x %d) to %s\n", synth.images.size(),
                classes, per_class, out_dir.c_str());
    std::printf("manifest: %s\n", (fs::path(out_dir) / "manifest.json").string().c_str());
    return 0;
}

int cmd_extract(const std::string& dataset, const std::string& out_dir) {
    DatasetManifest manifest = ingest(dataset);
    const std::size_t n = manifest.entries.size();
    std::array<std::vector<LabeledSample>, 4> columns;
    for (auto& c : columns) c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const BinaryImage img = binarize(load_pgm(manifest.entries[i].path));
        auto feats = extract_all(img);
        for (std::size_t k = 0; k < 4; ++k)
            columns[k][i] = {std::move(feats[k].values), manifest.entries[i].label};
    }
    fs::create_directories(out_dir);
    for (std::size_t k = 0; k < 4; ++k) {
        const FeatureKind kind = kAllFeatureKinds[k];
        const std::string path =
            (fs::path(out_dir) / ("features-" + to_string(kind) + ".txt")).string();
        save_feature_matrix(path, kind, columns[k]);
        std::printf("%s: %zu rows x %d\n", path.c_str(), n, dimension(kind));
    }
    return 0;
}

int cmd_train(const CommonFlags& flags) {
    const PipelineConfig cfg = resolve_config(flags);
    train_models(cfg);
    std::printf("models written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_evaluate(const CommonFlags& flags) {
    const PipelineConfig cfg = resolve_config(flags);
    const EvalReport report = run_pipeline(cfg);
    std::fputs(render_report(report, false).c_str(), stdout);
    std::printf("\nreport: %s\n",
                (fs::path(cfg.out_dir) / "report.json").string().c_str());
    return 0;
}

int cmd_predict(const std::vector<std::string>& images,
                const std::string& model_dir, const std::string& fusion) {
    const PipelineConfig cfg =
        load_config((fs::path(model_dir) / "config.json").string());
    const bool with_mlp = cfg.classifier != "svm";
    const bool with_svm = cfg.classifier != "mlp-ensemble";
    const ModelBundle bundle = load_bundle(model_dir, with_svm, with_mlp);

    for (const std::string& path : images) {
        const BinaryImage img = preprocess_gray(load_pgm(path));
        const auto feats = extract_all(img);
        std::vector<double> row;
        row.reserve(kConcatDim);
        for (const auto& f : feats)
            row.insert(row.end(), f.values.begin(), f.values.end());
        const std::vector<double> scaled = apply_scaler(bundle.scaler, row);

        std::printf("%s:", path.c_str());
        if (with_mlp) {
            std::array<ExpertDecision, 4> decisions;
            for (std::size_t k = 0; k < 4; ++k) {
                const FeatureKind kind = kAllFeatureKinds[k];
                const int off = concat_offset(kind);
                std::vector<double> x(scaled.begin() + off,
                                      scaled.begin() + off + dimension(kind));
                auto [label, scores] = predict(bundle.experts[k], x);
                decisions[k] = ExpertDecision{kind, label, std::move(scores)};
            }
            FusedDecision fused;
            if (fusion == "unanimous")
                fused = fuse_unanimous(decisions);
            else if (fusion == "any")
                fused = fuse_any(decisions);
            else
                fused = fuse_weighted(decisions, bundle.weights, cfg.weighted_mode);
            if (fused.top1 == kRejected)
                std::printf(" ensemble-%s=rejected", fusion.c_str());
            else
                std::printf(" ensemble-%s=%d", fusion.c_str(), fused.top1);
        }
        if (with_svm) {
            std::vector<double> x = scaled;
            if (cfg.svm_feature != "concat") {
                const FeatureKind kind = feature_kind_from_string(cfg.svm_feature);
                const int off = concat_offset(kind);
                x.assign(scaled.begin() + off,
                         scaled.begin() + off + dimension(kind));
            }
            auto [label, scores] = predict(*bundle.svm, x);
            std::printf(" svm=%d", label);
        }
        std::printf("\n");
    }
    return 0;
}

int cmd_report(const std::string& in_path, bool machine) {
    const EvalReport report = load_report(in_path);
    std::fputs(render_report(report, machine).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glyphrec: structural-feature handwritten character recognition"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* ingest_cmd = app.add_subcommand(
        "ingest", "scan a class-per-subdirectory dataset and build a manifest");
    std::string ingest_root, ingest_out;
    ingest_cmd->add_option("root", ingest_root, "dataset root or manifest path")
        ->required();
    ingest_cmd->add_option("--out", ingest_out, "write manifest JSON here");

    auto* synth_cmd =
        app.add_subcommand("synth", "generate a synthetic glyph dataset");
    int synth_classes = 10, synth_per_class = 70;
    double synth_noise = 0.02;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "synth-data";
    synth_cmd->add_option("--classes", synth_classes, "number of classes (1..49)");
    synth_cmd->add_option("--per-class", synth_per_class, "glyphs per class");
    synth_cmd->add_option("--noise", synth_noise, "pixel flip probability");
    synth_cmd->add_option("--seed", synth_seed, "master RNG seed");
    synth_cmd->add_option("--out", synth_out, "output directory");

    auto* extract_cmd = app.add_subcommand(
        "extract", "write per-kind feature matrices for a dataset");
    std::string extract_dataset, extract_out = "features";
    extract_cmd->add_option("--dataset", extract_dataset, "dataset root or manifest")
        ->required();
    extract_cmd->add_option("--out", extract_out, "output directory");

    auto* train_cmd =
        app.add_subcommand("train", "train classifiers and persist models");
    add_common(train_cmd, flags);

    auto* eval_cmd = app.add_subcommand(
        "evaluate", "train, evaluate, and write report.json");
    add_common(eval_cmd, flags);

    auto* predict_cmd =
        app.add_subcommand("predict", "classify PGM images with trained models");
    std::vector<std::string> predict_images;
    std::string predict_model_dir = "run", predict_fusion = "weighted";
    predict_cmd->add_option("images", predict_images, "PGM image paths")
        ->required();
    predict_cmd->add_option("--model-dir", predict_model_dir,
                            "directory written by train/evaluate");
    predict_cmd
        ->add_option("--fusion", predict_fusion,
                     "ensemble rule: unanimous, any, or weighted")
        ->check(CLI::IsMember({"unanimous", "any", "weighted"}));

    auto* report_cmd =
        app.add_subcommand("report", "render a previously written report.json");
    std::string report_in = "run/report.json";
    bool report_machine = false;
    report_cmd->add_option("--in", report_in, "report JSON path");
    report_cmd->add_flag("--machine", report_machine,
                         "emit machine-readable CSV rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest_cmd->parsed()) return cmd_ingest(ingest_root, ingest_out);
        if (synth_cmd->parsed())
            return cmd_synth(synth_classes, synth_per_class, synth_noise,
                             synth_seed, synth_out);
        if (extract_cmd->parsed()) return cmd_extract(extract_dataset, extract_out);
        if (train_cmd->parsed()) return cmd_train(flags);
        if (eval_cmd->parsed()) return cmd_evaluate(flags);
        if (predict_cmd->parsed())
            return cmd_predict(predict_images, predict_model_dir, predict_fusion);
        if (report_cmd->parsed()) return cmd_report(report_in, report_machine);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
