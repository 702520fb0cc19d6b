#ifndef GLYPHREC_DATASET_HPP
#define GLYPHREC_DATASET_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glyphrec/features.hpp"
#include "glyphrec/image.hpp"
#include "glyphrec/mlp.hpp"

namespace glyphrec {

inline constexpr int kMaxClasses = 49;

struct ManifestEntry {
    std::string path;
    int label = 0;
    std::string source = "own";  // isi, own or synthetic

    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<std::string> class_names;

    bool operator==(const DatasetManifest&) const = default;
};

std::vector<std::string> default_class_names(int count);

// Builds a manifest from a directory of per-class subfolders of .pgm files
// (labels follow subfolder sort order) or from a saved manifest file. Every
// referenced image is opened once; unreadable files fail with their paths.
DatasetManifest ingest(const std::string& root_or_manifest);

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

struct SplitSpec {
    double train_fraction = 0.7;
    double selection_fraction = 0.0;
    std::uint64_t seed = 0;
    bool stratified = true;
};

// Index partition of the manifest entries.
struct SplitResult {
    std::vector<std::size_t> train;
    std::vector<std::size_t> selection;
    std::vector<std::size_t> test;
};

// Seeded partition; stratified mode shuffles and cuts within each class,
// and every class must land at least one sample in each requested part.
SplitResult split(const DatasetManifest& manifest, const SplitSpec& spec);

// Per-feature min-max transform fitted on the training split. Features
// with min = max map to 0; clamp squeezes out-of-range test values into
// [0,1].
struct ScalerModel {
    std::vector<double> min;
    std::vector<double> max;
    bool clamp = true;

    bool operator==(const ScalerModel&) const = default;
};

ScalerModel fit_scaler(const std::vector<std::vector<double>>& rows);
std::vector<double> apply_scaler(const ScalerModel& scaler,
                                 const std::vector<double>& x);

// Deterministic synthetic corpus: per class one stroke-template composition
// rendered at 100x100, with seeded affine jitter of up to 10% and seeded
// pixel flips at the given rate.
struct SynthResult {
    std::vector<BinaryImage> images;
    std::vector<int> labels;
    DatasetManifest manifest;
};

SynthResult synth_glyphs(int classes, int per_class, double noise,
                         std::uint64_t seed);

// Writes the images as PGM files under dir plus a manifest.json, and points
// the manifest entries at the written files.
void write_synth_dataset(SynthResult& synth, const std::string& dir);

// Columnar text persistence for extracted feature matrices: a small header
// (kind, dimension, count) followed by one "label v1 .. vd" row per sample.
void save_feature_matrix(const std::string& path, FeatureKind kind,
                         const std::vector<LabeledSample>& rows);
std::pair<FeatureKind, std::vector<LabeledSample>> load_feature_matrix(
    const std::string& path);

}  // namespace glyphrec

#endif  // GLYPHREC_DATASET_HPP
