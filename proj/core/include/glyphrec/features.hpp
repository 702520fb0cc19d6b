#ifndef GLYPHREC_FEATURES_HPP
#define GLYPHREC_FEATURES_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "glyphrec/image.hpp"

namespace glyphrec {

enum class FeatureKind { Shadow, ChainHistogram, ViewBased, LongestRun };

inline constexpr std::array<FeatureKind, 4> kAllFeatureKinds = {
    FeatureKind::Shadow, FeatureKind::ChainHistogram, FeatureKind::ViewBased,
    FeatureKind::LongestRun};

constexpr int dimension(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Shadow: return 24;
        case FeatureKind::ChainHistogram: return 200;
        case FeatureKind::ViewBased: return 44;
        case FeatureKind::LongestRun: return 100;
    }
    return 0;
}

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& name);

struct FeatureVector {
    FeatureKind kind = FeatureKind::Shadow;
    std::vector<double> values;

    bool operator==(const FeatureVector&) const = default;
};

// Shadow features, 24 values in [0,1]. The object bounding box is cut into
// 8 triangles by its diagonals and center axes; octants run clockwise from
// the upper north-east triangle. Each triangle contributes its three side
// coverages in the order half-edge, half-diagonal, half-axis: the fraction
// of the side covered by perpendicular projections of the object material
// (pixel squares intersected with the triangle) onto it.
FeatureVector extract_shadow(const BinaryImage& img);

// Chain-code histogram, 200 values: the image is cut into 5x5 blocks; each
// traced chain step is counted in the block holding the step's starting
// pixel. Layout: blocks in raster order, 8 direction bins per block.
FeatureVector extract_chain_histogram(const BinaryImage& img);

// View-based features, 44 values in [0,1]: top/bottom/left/right silhouette
// coordinates at 11 box-spanning sample positions each, normalized by box
// extent. Callers wanting the silhouette of the stroke skeleton thin the
// image first; this function reads its input as given.
FeatureVector extract_views(const BinaryImage& img);

// Longest-run features, 100 values: the bounding square hull is split into
// a 5x5 grid; each region yields its row, column, diagonal and anti-diagonal
// longest-run sums. Normalized mode divides each sum by the region area,
// raw mode keeps plain pixel counts.
FeatureVector extract_longest_run(const BinaryImage& img, bool normalized = true);

// Raw longest-run sums over one inclusive pixel window, in the order rows,
// columns, diagonals, anti-diagonals.
std::array<std::size_t, 4> longest_run_sums(const BinaryImage& img, int top,
                                            int left, int bottom, int right);

// Dispatch by kind. The input must already be preprocessed as the kind
// expects (see extract_views).
FeatureVector extract(FeatureKind kind, const BinaryImage& img);

}  // namespace glyphrec

#endif  // GLYPHREC_FEATURES_HPP
