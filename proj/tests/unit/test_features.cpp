#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "glyphrec/errors.hpp"
#include "glyphrec/features.hpp"
#include "glyphrec/image.hpp"
#include "helpers.hpp"

using namespace glyphrec;

namespace {

struct Pt {
    double x, y;
};

struct SideRef {
    Pt p, q;
};

struct TriRef {
    Pt a, b, c;  // c is always the box center
    std::array<SideRef, 3> sides;
};

// The eight octant triangles rebuilt from the documented convention:
// clockwise from the upper north-east triangle, each contributing its
// half-edge, half-diagonal, and half-axis sides in that order.
std::array<TriRef, 8> octant_triangles(const BBox& box) {
    const double x0 = box.left, x1 = box.right + 1.0;
    const double y0 = box.top, y1 = box.bottom + 1.0;
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const Pt north{cx, y0}, east{x1, cy}, south{cx, y1}, west{x0, cy};
    const Pt ne{x1, y0}, se{x1, y1}, sw{x0, y1}, nw{x0, y0};
    const Pt center{cx, cy};
    const std::array<std::pair<Pt, Pt>, 8> pairs = {{{north, ne},
                                                     {ne, east},
                                                     {east, se},
                                                     {se, south},
                                                     {south, sw},
                                                     {sw, west},
                                                     {west, nw},
                                                     {nw, north}}};
    std::array<TriRef, 8> tris;
    for (int o = 0; o < 8; ++o) {
        const auto& [a, b] = pairs[o];
        const Pt corner = o % 2 == 0 ? b : a;
        const Pt mid = o % 2 == 0 ? a : b;
        tris[o] = TriRef{a, b, center,
                         {SideRef{a, b}, SideRef{corner, center},
                          SideRef{mid, center}}};
    }
    return tris;
}

bool point_in_triangle(const TriRef& t, double px, double py) {
    auto cross = [](const Pt& o, const Pt& u, double x, double y) {
        return (u.x - o.x) * (y - o.y) - (u.y - o.y) * (x - o.x);
    };
    const double d1 = cross(t.a, t.b, px, py);
    const double d2 = cross(t.b, t.c, px, py);
    const double d3 = cross(t.c, t.a, px, py);
    const bool has_neg = d1 < -1e-9 || d2 < -1e-9 || d3 < -1e-9;
    const bool has_pos = d1 > 1e-9 || d2 > 1e-9 || d3 > 1e-9;
    return !(has_neg && has_pos);
}

// Point-sampling estimate of the shadow features. Object pixels are
// sampled on a fine interior grid; the samples of one pixel inside one
// triangle span a projection interval on each side (the clipped piece is
// convex, so its projection is an interval), and coverage is the fraction
// of bins any interval touches.
std::vector<double> sampled_shadow(const BinaryImage& img, int grid = 80,
                                   int bins = 1000) {
    const auto box = object_bbox(img);
    REQUIRE(box.has_value());
    const auto tris = octant_triangles(*box);
    std::vector<std::vector<char>> marked(24, std::vector<char>(bins, 0));
    for (int r = box->top; r <= box->bottom; ++r) {
        for (int c = box->left; c <= box->right; ++c) {
            if (!img.at(r, c)) continue;
            for (int o = 0; o < 8; ++o) {
                std::array<double, 3> lo{2.0, 2.0, 2.0};
                std::array<double, 3> hi{-1.0, -1.0, -1.0};
                for (int i = 0; i < grid; ++i) {
                    for (int j = 0; j < grid; ++j) {
                        const double px = c + (i + 0.5) / grid;
                        const double py = r + (j + 0.5) / grid;
                        if (!point_in_triangle(tris[o], px, py)) continue;
                        for (int s = 0; s < 3; ++s) {
                            const auto& side = tris[o].sides[s];
                            const double dx = side.q.x - side.p.x;
                            const double dy = side.q.y - side.p.y;
                            const double len2 = dx * dx + dy * dy;
                            double t = ((px - side.p.x) * dx +
                                        (py - side.p.y) * dy) /
                                       len2;
                            t = std::min(std::max(t, 0.0), 1.0 - 1e-12);
                            lo[s] = std::min(lo[s], t);
                            hi[s] = std::max(hi[s], t);
                        }
                    }
                }
                for (int s = 0; s < 3; ++s) {
                    if (hi[s] < lo[s]) continue;
                    const int first = static_cast<int>(lo[s] * bins);
                    const int last = static_cast<int>(hi[s] * bins);
                    for (int b = first; b <= last; ++b) marked[o * 3 + s][b] = 1;
                }
            }
        }
    }
    std::vector<double> est(24, 0.0);
    for (int f = 0; f < 24; ++f) {
        int count = 0;
        for (char m : marked[f]) count += m;
        est[f] = static_cast<double>(count) / bins;
    }
    return est;
}

BinaryImage translated(const BinaryImage& img, int dr, int dc, int w, int h) {
    BinaryImage out(w, h);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            if (img.at(r, c)) out.set(r + dr, c + dc, true);
    return out;
}

}  // namespace

TEST_CASE("feature kinds expose their dimensions and names") {
    CHECK(dimension(FeatureKind::Shadow) == 24);
    CHECK(dimension(FeatureKind::ChainHistogram) == 200);
    CHECK(dimension(FeatureKind::ViewBased) == 44);
    CHECK(dimension(FeatureKind::LongestRun) == 100);
    for (FeatureKind kind : kAllFeatureKinds) {
        CHECK(feature_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(feature_kind_from_string("nope"), InvalidArgument);
}

TEST_CASE("extract dispatch matches the per-kind entry points") {
    std::mt19937 rng(3);
    BinaryImage img = testutil::random_binary(rng, 20, 20, 0.3);
    img.set(10, 10, true);
    CHECK(extract(FeatureKind::Shadow, img) == extract_shadow(img));
    CHECK(extract(FeatureKind::ChainHistogram, img) == extract_chain_histogram(img));
    CHECK(extract(FeatureKind::ViewBased, img) == extract_views(img));
    CHECK(extract(FeatureKind::LongestRun, img) == extract_longest_run(img));
}

TEST_CASE("shadow of a solid box covers every side completely") {
    BinaryImage img(12, 12);
    for (int r = 3; r <= 8; ++r)
        for (int c = 2; c <= 9; ++c) img.set(r, c, true);
    const auto f = extract_shadow(img);
    REQUIRE(f.values.size() == 24);
    for (double v : f.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shadow octants without object material stay at zero") {
    // Four pins fix the bounding box to the full frame; each touches only
    // one octant, and the blob sits strictly inside the first octant.
    // Octants 2, 3 and 5 (right-lower, lower-right, left-lower) get nothing.
    BinaryImage img(100, 100);
    img.set(0, 20, true);   // top edge, left half: octant 7
    img.set(20, 0, true);   // left edge, upper half: octant 6
    img.set(20, 99, true);  // right edge, upper half: octant 1
    img.set(99, 20, true);  // bottom edge, left half: octant 4
    for (int r = 5; r <= 8; ++r)
        for (int c = 60; c <= 63; ++c) img.set(r, c, true);  // inside octant 0

    const auto f = extract_shadow(img);
    for (int o : {2, 3, 5})
        for (int s = 0; s < 3; ++s) CHECK(f.values[o * 3 + s] == 0.0);
    for (int o : {0, 1, 4, 6, 7})
        for (int s = 0; s < 3; ++s) CHECK(f.values[o * 3 + s] > 0.0);
}

TEST_CASE("one pixel near the center moves only its octants, slightly") {
    BinaryImage pins(100, 100);
    pins.set(0, 0, true);
    pins.set(0, 99, true);
    pins.set(99, 0, true);
    pins.set(99, 99, true);
    BinaryImage with_center = pins;
    with_center.set(49, 49, true);  // straddles the main diagonal: octants 6, 7

    const auto base = extract_shadow(pins);
    const auto grown = extract_shadow(with_center);
    for (int f = 0; f < 24; ++f) {
        const double delta = grown.values[f] - base.values[f];
        CHECK(delta >= 0.0);
        CHECK(delta <= 0.05);
        const int octant = f / 3;
        if (octant == 6 || octant == 7)
            CHECK(delta > 0.0);
        else
            CHECK(delta == 0.0);
    }
}

TEST_CASE("shadow features match a point-sampling estimate") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        BinaryImage img = testutil::random_binary(rng, 8, 8, 0.3);
        if (img.object_count() == 0) img.set(4, 4, true);
        const auto exact = extract_shadow(img);
        const auto estimate = sampled_shadow(img);
        for (int f = 0; f < 24; ++f)
            CHECK(std::abs(exact.values[f] - estimate[f]) <= 0.06);
    }
}

TEST_CASE("shadow is translation invariant and monotone in the object") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        BinaryImage img = testutil::random_binary(rng, 10, 9, 0.35);
        if (img.object_count() == 0) img.set(5, 5, true);
        const auto moved = translated(img, 7, 11, 40, 40);
        CHECK(extract_shadow(img).values == extract_shadow(moved).values);

        // Monotonicity only holds while the bounding box stays fixed, so
        // the extra pixel is drawn inside the existing box.
        const auto box = object_bbox(img);
        REQUIRE(box.has_value());
        BinaryImage grown = img;
        const int rr = box->top + static_cast<int>(rng() % (box->bottom - box->top + 1));
        const int cc = box->left + static_cast<int>(rng() % (box->right - box->left + 1));
        grown.set(rr, cc, true);
        const auto before = extract_shadow(img);
        const auto after = extract_shadow(grown);
        for (int f = 0; f < 24; ++f)
            CHECK(after.values[f] >= before.values[f] - 1e-12);
    }
}

TEST_CASE("shadow features stay inside [0,1]") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryImage img = testutil::random_binary(rng, 14, 14, 0.5);
        if (img.object_count() == 0) img.set(3, 3, true);
        for (double v : extract_shadow(img).values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("shadow rejects an empty image") {
    CHECK_THROWS_AS(extract_shadow(BinaryImage(10, 10)), EmptyImage);
    CHECK_THROWS_AS(extract_views(BinaryImage(10, 10)), EmptyImage);
}

TEST_CASE("chain histogram of a corner square lands in block zero") {
    // 15x15 frame: the leading 3x3 block column fully contains the square.
    BinaryImage img(15, 15);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) img.set(r, c, true);
    const auto f = extract_chain_histogram(img);
    REQUIRE(f.values.size() == 200);
    // The clockwise square tour emits two steps of each of east, south,
    // west, north, all starting inside block (0,0).
    CHECK(f.values[0] == 2.0);  // east
    CHECK(f.values[2] == 2.0);  // north
    CHECK(f.values[4] == 2.0);  // west
    CHECK(f.values[6] == 2.0);  // south
    double rest = 0.0;
    for (int i = 0; i < 200; ++i)
        if (i != 0 && i != 2 && i != 4 && i != 6) rest += f.values[i];
    CHECK(rest == 0.0);
}

TEST_CASE("chain histogram attributes steps to their starting block") {
    BinaryImage img(10, 10);
    for (int c = 0; c < 10; ++c) img.set(0, c, true);
    const auto f = extract_chain_histogram(img);
    // Out: nine east steps starting at columns 0..8. Back: nine west steps
    // starting at columns 9..1. Blocks are two columns wide.
    auto at = [&f](int block_col, int code) {
        return f.values[static_cast<std::size_t>(block_col) * 8 + code];
    };
    CHECK(at(0, 0) == 2.0);
    CHECK(at(1, 0) == 2.0);
    CHECK(at(2, 0) == 2.0);
    CHECK(at(3, 0) == 2.0);
    CHECK(at(4, 0) == 1.0);
    CHECK(at(0, 4) == 1.0);
    CHECK(at(1, 4) == 2.0);
    CHECK(at(2, 4) == 2.0);
    CHECK(at(3, 4) == 2.0);
    CHECK(at(4, 4) == 2.0);
}

TEST_CASE("chain histogram mass equals the traced step count") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryImage img = testutil::random_binary(rng, 15, 15, 0.4);
        std::size_t steps = 0;
        for (const auto& chain : trace_chains(img)) steps += chain.codes.size();
        const auto f = extract_chain_histogram(img);
        double mass = 0.0;
        for (double v : f.values) mass += v;
        CHECK(mass == static_cast<double>(steps));
    }
}

TEST_CASE("chain histogram per-direction totals survive translation") {
    std::mt19937 rng(47);
    BinaryImage img = testutil::random_binary(rng, 9, 9, 0.4);
    img.set(4, 4, true);
    const BinaryImage moved = translated(img, 3, 2, 20, 20);
    auto totals = [](const FeatureVector& f) {
        std::array<double, 8> t{};
        for (int i = 0; i < 200; ++i) t[i % 8] += f.values[i];
        return t;
    };
    CHECK(totals(extract_chain_histogram(img)) ==
          totals(extract_chain_histogram(moved)));
}

TEST_CASE("views of a solid square are flat profiles") {
    const auto f = extract_views(testutil::solid(30, 30));
    REQUIRE(f.values.size() == 44);
    for (int i = 0; i < 11; ++i) {
        CHECK(f.values[i] == 0.0);        // top
        CHECK(f.values[11 + i] == 1.0);   // bottom
        CHECK(f.values[22 + i] == 0.0);   // left
        CHECK(f.values[33 + i] == 1.0);   // right
    }
}

TEST_CASE("views of a diagonal ramp sample evenly") {
    BinaryImage img(21, 21);
    for (int r = 0; r < 21; ++r) img.set(r, r, true);
    const auto f = extract_views(img);
    for (int i = 0; i < 11; ++i) {
        const double expected = i / 10.0;
        CHECK(f.values[i] == doctest::Approx(expected));
        CHECK(f.values[11 + i] == doctest::Approx(expected));
        CHECK(f.values[22 + i] == doctest::Approx(expected));
        CHECK(f.values[33 + i] == doctest::Approx(expected));
    }
}

TEST_CASE("views report zero for sample lines without object pixels") {
    BinaryImage img(11, 11);
    for (int r = 0; r < 11; ++r) {
        img.set(r, 0, true);
        img.set(r, 10, true);
    }
    const auto f = extract_views(img);
    for (int i = 1; i < 10; ++i) {
        CHECK(f.values[i] == 0.0);       // empty interior columns
        CHECK(f.values[11 + i] == 0.0);
    }
    CHECK(f.values[11] == 1.0);       // bottom at the first column
    CHECK(f.values[11 + 10] == 1.0);  // bottom at the last column
    for (int i = 0; i < 11; ++i) {
        CHECK(f.values[22 + i] == 0.0);  // left profile hits column 0
        CHECK(f.values[33 + i] == 1.0);  // right profile hits column 10
    }
}

TEST_CASE("longest-run window sums match the printed figure") {
    // 6x6 grid: 101111 / 100110 / 100110 / 100010 / 010010 / 001100.
    const std::vector<std::string> rows = {"101111", "100110", "100110",
                                           "100010", "010010", "001100"};
    BinaryImage img(6, 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) img.set(r, c, rows[r][c] == '1');
    const auto sums = longest_run_sums(img, 0, 0, 5, 5);
    CHECK(sums[0] == 12);  // row-wise: 4+2+2+1+1+2
    CHECK(sums == testutil::brute_longest_run_sums(img, 0, 0, 5, 5));
}

TEST_CASE("longest-run sums match brute force on random windows") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 3 + static_cast<int>(rng() % 10);
        const int h = 3 + static_cast<int>(rng() % 10);
        const BinaryImage img = testutil::random_binary(rng, w, h, 0.5);
        const int top = static_cast<int>(rng() % h);
        const int bottom = top + static_cast<int>(rng() % (h - top));
        const int left = static_cast<int>(rng() % w);
        const int right = left + static_cast<int>(rng() % (w - left));
        CHECK(longest_run_sums(img, top, left, bottom, right) ==
              testutil::brute_longest_run_sums(img, top, left, bottom, right));
    }
}

TEST_CASE("longest-run features are region blocks of four axis sums") {
    const BinaryImage img = testutil::solid(10, 10);
    const auto f = extract_longest_run(img);
    REQUIRE(f.values.size() == 100);
    for (double v : f.values) CHECK(v == 1.0);  // area-normalized solid runs

    const auto raw = extract_longest_run(img, false);
    for (double v : raw.values) CHECK(v == 4.0);  // 2x2 regions, sums of 4
}

TEST_CASE("longest-run regions tile the square hull") {
    std::mt19937 rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        BinaryImage img = testutil::random_binary(rng, 10, 10, 0.45);
        img.set(0, 0, true);
        img.set(9, 9, true);  // pin the hull to the full frame
        const auto f = extract_longest_run(img, false);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const auto sums = testutil::brute_longest_run_sums(
                    img, 2 * i, 2 * j, 2 * i + 1, 2 * j + 1);
                for (int k = 0; k < 4; ++k)
                    CHECK(f.values[static_cast<std::size_t>(i * 5 + j) * 4 + k] ==
                          static_cast<double>(sums[k]));
            }
        }
    }
}

TEST_CASE("longest-run hull is square even for oblong objects") {
    BinaryImage img(40, 40);
    for (int r = 10; r <= 12; ++r)
        for (int c = 5; c <= 34; ++c) img.set(r, c, true);
    // Hull side 30 centered on the 3-row box: raw sums over 6-row regions.
    const auto raw = extract_longest_run(img, false);
    const auto norm = extract_longest_run(img, true);
    for (int i = 0; i < 100; ++i)
        CHECK(norm.values[i] == doctest::Approx(raw.values[i] / 36.0));
}
