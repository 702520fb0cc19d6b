#ifndef GLYPHREC_IMAGE_HPP
#define GLYPHREC_IMAGE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace glyphrec {

// 8-bit grayscale raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int r, int c) const {
        return pixels[static_cast<std::size_t>(r) * width + c];
    }
    std::uint8_t& at(int r, int c) {
        return pixels[static_cast<std::size_t>(r) * width + c];
    }
    bool in_bounds(int r, int c) const {
        return r >= 0 && r < height && c >= 0 && c < width;
    }
    bool operator==(const GrayImage&) const = default;
};

// Black/white raster, row-major, 1 = object (ink), 0 = background.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    BinaryImage() = default;
    BinaryImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    bool at(int r, int c) const {
        return pixels[static_cast<std::size_t>(r) * width + c] != 0;
    }
    void set(int r, int c, bool v) {
        pixels[static_cast<std::size_t>(r) * width + c] = v ? 1 : 0;
    }
    bool in_bounds(int r, int c) const {
        return r >= 0 && r < height && c >= 0 && c < width;
    }
    std::size_t object_count() const {
        std::size_t n = 0;
        for (auto p : pixels) n += (p != 0);
        return n;
    }
    bool operator==(const BinaryImage&) const = default;
};

// One traced contour: a start pixel plus Freeman direction codes.
struct ContourChain {
    int start_row = 0;
    int start_col = 0;
    std::vector<std::uint8_t> codes;

    bool operator==(const ContourChain&) const = default;
};

// Freeman code convention: 0 = east, increasing counter-clockwise.
// code:        0   1   2   3   4   5   6   7
// direction:   E   NE  N   NW  W   SW  S   SE
inline constexpr std::array<int, 8> kChainRowStep = {0, -1, -1, -1, 0, 1, 1, 1};
inline constexpr std::array<int, 8> kChainColStep = {1, 1, 0, -1, -1, -1, 0, 1};

// Tight bounding box of the object pixels, inclusive on all edges.
struct BBox {
    int top = 0;
    int left = 0;
    int bottom = 0;
    int right = 0;

    int height() const { return bottom - top + 1; }
    int width() const { return right - left + 1; }
    bool operator==(const BBox&) const = default;
};

std::optional<BBox> object_bbox(const BinaryImage& img);

// PGM (P2 ASCII / P5 raw) reading and writing. save_pgm writes P5 unless
// ascii is requested; writes go through a temp file plus rename.
GrayImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, const GrayImage& img, bool ascii = false);

// Object pixels render as 0 (black), background as 255.
GrayImage to_gray(const BinaryImage& img);

// Otsu's threshold over t in [1,255]: maximizes between-class variance,
// smallest t on ties. A pixel is object iff intensity < t.
int otsu_threshold(const GrayImage& img);
BinaryImage binarize(const GrayImage& img);

// Crops to the object bounding box and nearest-neighbor rescales it to
// size x size. The sample map keeps both box endpoints, and a second pass
// runs if downscaling dropped a box edge, so the result always fills its
// frame and normalize is idempotent.
BinaryImage normalize(const BinaryImage& img, int size = 100);

// Zhang-Suen skeleton. Off-image counts as background.
BinaryImage thin(const BinaryImage& img);

// Object pixels with at least one background 4-neighbor, in raster order.
// Border pixels treat off-image as background.
std::vector<std::pair<int, int>> contour_points(const BinaryImage& img);

// Clockwise Moore tour over each connected contour. Seeds are taken in
// raster order among unclaimed contour points; from each position the next
// move is the first contour-point neighbor found scanning clockwise from
// just after the reversal of the previous direction, skipping points owned
// by earlier chains. A chain ends when no move exists or when the chosen
// (position, direction) step repeats. Every contour point lands in exactly
// one chain.
std::vector<ContourChain> trace_chains(const BinaryImage& img);

}  // namespace glyphrec

#endif  // GLYPHREC_IMAGE_HPP
