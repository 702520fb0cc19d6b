#ifndef GLYPHREC_PIPELINE_HPP
#define GLYPHREC_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glyphrec/dataset.hpp"
#include "glyphrec/ensemble.hpp"
#include "glyphrec/features.hpp"
#include "glyphrec/image.hpp"
#include "glyphrec/mlp.hpp"
#include "glyphrec/svm.hpp"

namespace glyphrec {

struct PipelineConfig {
    std::uint64_t seed = 0;

    // Dataset: a manifest file or class-folder directory; empty switches to
    // the synthetic generator.
    std::string dataset;
    int synth_classes = 10;
    int synth_per_class = 70;
    double synth_noise = 0.02;

    double train_fraction = 5.0 / 7.0;
    double selection_fraction = 0.0;
    bool stratified = true;

    // mlp-ensemble, svm or all
    std::string classifier = "all";

    int mlp_hidden_dim = 40;
    int mlp_epochs = 30;
    double mlp_learning_rate = 0.8;
    double mlp_momentum = 0.7;

    // "derived" recomputes fusion weights from expert accuracies on the
    // selection split (training split when there is none); "reference" uses
    // the published preset.
    std::string fusion_weights = "derived";
    WeightedMode weighted_mode = WeightedMode::BinaryVotes;

    Kernel kernel{Kernel::Tag::Rbf, 0.0, 2};  // sigma <= 0 picks the default
    double svm_c = 1.0;
    std::vector<double> c_grid;                // non-empty enables grid search
    std::string svm_feature = "concat";        // concat or one feature kind
    MulticlassScheme scheme = MulticlassScheme::OneVsRest;
    double tol = 1e-3;

    std::string out_dir = "run";
};

PipelineConfig load_config(const std::string& path);
// CLI overrides are applied by the tool; this writes the effective config.
std::string config_to_json(const PipelineConfig& cfg);

struct ClassifierEval {
    std::string name;
    double test_top1 = 0.0;
    double test_top5 = 0.0;
    double train_top1 = 0.0;
    double train_top5 = 0.0;
    // Fraction of samples not rejected; 1 except for unanimous voting.
    double test_coverage = 1.0;
    double train_coverage = 1.0;
    // Any-vote set-membership accuracy; negative when not applicable.
    double test_oracle_top1 = -1.0;
    double train_oracle_top1 = -1.0;
    std::vector<std::vector<int>> test_confusion;
    std::vector<int> test_rejected;
    std::size_t parameter_count = 0;
    std::size_t model_bytes = 0;
    // Wall-clock numbers live in the separate timings file so the report
    // itself stays byte-identical across reruns.
    double train_seconds = 0.0;
    double predict_us_per_sample = 0.0;
};

struct EvalReport {
    std::uint64_t seed = 0;
    int num_classes = kMaxClasses;
    std::string dataset_origin;
    std::size_t train_count = 0;
    std::size_t selection_count = 0;
    std::size_t test_count = 0;
    FusionWeights weights_used;
    std::string svm_feature;
    std::string kernel_desc;
    double svm_c = 0.0;
    std::vector<ClassifierEval> classifiers;

    const ClassifierEval* find(const std::string& name) const {
        for (const auto& c : classifiers)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// Models produced by one training run, as persisted in the output directory.
struct ModelBundle {
    ScalerModel scaler;  // fitted on the concatenated 368-value layout
    std::array<MlpModel, 4> experts;
    FusionWeights weights;
    std::optional<SvmModel> svm;
};

// Offsets of each feature kind inside the concatenated layout.
int concat_offset(FeatureKind kind);
inline constexpr int kConcatDim = 368;

BinaryImage preprocess_gray(const GrayImage& img);

// Normalizes, extracts all four kinds; the view extractor sees the thinned
// image (or the unthinned one if thinning erased everything).
std::array<FeatureVector, 4> extract_all(const BinaryImage& binary);

// train persists the bundle into cfg.out_dir; evaluate additionally writes
// report.json and timings.json there and returns the report.
ModelBundle train_models(const PipelineConfig& cfg);
EvalReport run_pipeline(const PipelineConfig& cfg);

ModelBundle load_bundle(const std::string& dir, bool need_svm, bool need_mlp);

void save_report(const EvalReport& report, const std::string& path);
EvalReport load_report(const std::string& path);

// Tables-style text rendering, or one machine-readable
// "classifier,split,metric,value" row per line.
std::string render_report(const EvalReport& report, bool machine_rows);

}  // namespace glyphrec

#endif  // GLYPHREC_PIPELINE_HPP
