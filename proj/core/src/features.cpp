#include "glyphrec/features.hpp"

#include <algorithm>
#include <cmath>

#include "glyphrec/errors.hpp"

namespace glyphrec {

std::string to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Shadow: return "shadow";
        case FeatureKind::ChainHistogram: return "chain-histogram";
        case FeatureKind::ViewBased: return "view-based";
        case FeatureKind::LongestRun: return "longest-run";
    }
    return "unknown";
}

FeatureKind feature_kind_from_string(const std::string& name) {
    for (FeatureKind k : kAllFeatureKinds)
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown feature kind '" + name + "'");
}

namespace {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// One Sutherland-Hodgman pass: keeps the side of line a-b where sign*cross
// is non-negative, so triangle boundaries count as inside.
void clip_halfplane(const std::vector<Vec2>& poly, const Vec2& a, const Vec2& b,
                    double sign, std::vector<Vec2>& out) {
    out.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double dp = sign * cross(a, b, p);
        const double dq = sign * cross(a, b, q);
        if (dp >= 0.0) out.push_back(p);
        if ((dp >= 0.0) != (dq >= 0.0)) {
            const double t = dp / (dp - dq);
            out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
}

struct Triangle {
    std::array<Vec2, 3> v;        // center, then the two outer vertices
    std::array<double, 3> sign;   // inside sign per edge (v[i], v[(i+1)%3])
    double min_x, max_x, min_y, max_y;
};

Triangle make_triangle(const Vec2& center, const Vec2& a, const Vec2& b) {
    Triangle t;
    t.v = {center, a, b};
    for (int i = 0; i < 3; ++i) {
        const Vec2& p = t.v[i];
        const Vec2& q = t.v[(i + 1) % 3];
        const Vec2& opposite = t.v[(i + 2) % 3];
        const double c = cross(p, q, opposite);
        t.sign[i] = c >= 0.0 ? 1.0 : -1.0;
    }
    t.min_x = std::min({t.v[0].x, t.v[1].x, t.v[2].x});
    t.max_x = std::max({t.v[0].x, t.v[1].x, t.v[2].x});
    t.min_y = std::min({t.v[0].y, t.v[1].y, t.v[2].y});
    t.max_y = std::max({t.v[0].y, t.v[1].y, t.v[2].y});
    return t;
}

struct Side {
    Vec2 a, b;
    double inv_len_sq = 0.0;
};

Side make_side(const Vec2& a, const Vec2& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    return {a, b, 1.0 / (dx * dx + dy * dy)};
}

// Sorts and merges the projection intervals, then totals their length.
double union_length(std::vector<std::pair<double, double>>& spans) {
    if (spans.empty()) return 0.0;
    std::sort(spans.begin(), spans.end());
    double total = 0.0;
    double lo = spans[0].first;
    double hi = spans[0].second;
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first <= hi + 1e-12) {
            hi = std::max(hi, spans[i].second);
        } else {
            total += hi - lo;
            lo = spans[i].first;
            hi = spans[i].second;
        }
    }
    total += hi - lo;
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace

FeatureVector extract_shadow(const BinaryImage& img) {
    const auto box = object_bbox(img);
    if (!box) throw EmptyImage("extract_shadow: no object pixels");

    // Box-relative coordinates keep the arithmetic identical wherever the
    // object sits, so translation invariance holds bit for bit.
    const double x0 = 0.0, x1 = box->right - box->left + 1.0;
    const double y0 = 0.0, y1 = box->bottom - box->top + 1.0;
    const Vec2 center{(x0 + x1) / 2.0, (y0 + y1) / 2.0};
    const Vec2 n{center.x, y0}, e{x1, center.y}, s{center.x, y1}, w{x0, center.y};
    const Vec2 ne{x1, y0}, se{x1, y1}, sw{x0, y1}, nw{x0, y0};

    // Octants clockwise from the upper north-east triangle. The outer pair
    // is (a, b); on even octants b is the box corner, on odd octants a is.
    const std::array<std::pair<Vec2, Vec2>, 8> outer = {{
        {n, ne}, {ne, e}, {e, se}, {se, s}, {s, sw}, {sw, w}, {w, nw}, {nw, n}}};

    std::array<Triangle, 8> tris;
    std::array<std::array<Side, 3>, 8> sides;
    for (int o = 0; o < 8; ++o) {
        const Vec2& a = outer[o].first;
        const Vec2& b = outer[o].second;
        tris[o] = make_triangle(center, a, b);
        const Vec2& corner = (o % 2 == 0) ? b : a;
        const Vec2& mid = (o % 2 == 0) ? a : b;
        sides[o] = {make_side(a, b), make_side(corner, center),
                    make_side(mid, center)};
    }

    std::array<std::array<std::vector<std::pair<double, double>>, 3>, 8> spans;
    std::vector<Vec2> poly, clipped;
    for (int r = box->top; r <= box->bottom; ++r) {
        for (int c = box->left; c <= box->right; ++c) {
            if (!img.at(r, c)) continue;
            const double px = c - box->left, py = r - box->top;
            for (int o = 0; o < 8; ++o) {
                const Triangle& tri = tris[o];
                if (px + 1.0 < tri.min_x || px > tri.max_x ||
                    py + 1.0 < tri.min_y || py > tri.max_y)
                    continue;
                poly = {{px, py}, {px + 1, py}, {px + 1, py + 1}, {px, py + 1}};
                for (int edge = 0; edge < 3 && !poly.empty(); ++edge) {
                    clip_halfplane(poly, tri.v[edge], tri.v[(edge + 1) % 3],
                                   tri.sign[edge], clipped);
                    poly.swap(clipped);
                }
                if (poly.size() < 3) continue;
                // Contact along a triangle edge clips to a zero-area sliver;
                // material without area casts no shadow.
                double area2 = 0.0;
                for (std::size_t i = 0; i < poly.size(); ++i) {
                    const Vec2& p = poly[i];
                    const Vec2& q = poly[(i + 1) % poly.size()];
                    area2 += p.x * q.y - q.x * p.y;
                }
                if (std::abs(area2) <= 1e-9) continue;
                for (int sd = 0; sd < 3; ++sd) {
                    const Side& side = sides[o][sd];
                    double lo = 2.0, hi = -1.0;
                    for (const Vec2& v : poly) {
                        const double t = ((v.x - side.a.x) * (side.b.x - side.a.x) +
                                          (v.y - side.a.y) * (side.b.y - side.a.y)) *
                                         side.inv_len_sq;
                        lo = std::min(lo, t);
                        hi = std::max(hi, t);
                    }
                    lo = std::clamp(lo, 0.0, 1.0);
                    hi = std::clamp(hi, 0.0, 1.0);
                    if (hi > lo) spans[o][sd].emplace_back(lo, hi);
                }
            }
        }
    }

    FeatureVector out{FeatureKind::Shadow, std::vector<double>(24, 0.0)};
    for (int o = 0; o < 8; ++o)
        for (int sd = 0; sd < 3; ++sd)
            out.values[o * 3 + sd] = union_length(spans[o][sd]);
    return out;
}

FeatureVector extract_chain_histogram(const BinaryImage& img) {
    FeatureVector out{FeatureKind::ChainHistogram, std::vector<double>(200, 0.0)};
    if (img.width < 1 || img.height < 1) return out;
    const auto chains = trace_chains(img);
    for (const auto& chain : chains) {
        int r = chain.start_row;
        int c = chain.start_col;
        for (std::uint8_t code : chain.codes) {
            // A step counts in the block holding its starting pixel.
            const int br = r * 5 / img.height;
            const int bc = c * 5 / img.width;
            out.values[static_cast<std::size_t>(br * 5 + bc) * 8 + code] += 1.0;
            r += kChainRowStep[code];
            c += kChainColStep[code];
        }
    }
    return out;
}

namespace {

// Endpoint-inclusive sample position i of 11 across [0, extent).
int view_sample(int i, int extent) {
    if (extent <= 1) return 0;
    return static_cast<int>((2LL * i * (extent - 1) + 10) / 20);
}

}  // namespace

FeatureVector extract_views(const BinaryImage& img) {
    const auto box = object_bbox(img);
    if (!box) throw EmptyImage("extract_views: no object pixels");
    const int bw = box->width();
    const int bh = box->height();

    FeatureVector out{FeatureKind::ViewBased, std::vector<double>(44, 0.0)};
    const double row_denom = bh > 1 ? bh - 1 : 0.0;
    const double col_denom = bw > 1 ? bw - 1 : 0.0;

    for (int i = 0; i < 11; ++i) {
        const int c = box->left + view_sample(i, bw);
        int min_r = -1, max_r = -1;
        for (int r = box->top; r <= box->bottom; ++r) {
            if (!img.at(r, c)) continue;
            if (min_r < 0) min_r = r;
            max_r = r;
        }
        // A sampled line with no object pixel contributes 0, as does a
        // degenerate box extent.
        if (min_r >= 0 && row_denom > 0.0) {
            out.values[i] = (min_r - box->top) / row_denom;
            out.values[11 + i] = (max_r - box->top) / row_denom;
        }
    }
    for (int i = 0; i < 11; ++i) {
        const int r = box->top + view_sample(i, bh);
        int min_c = -1, max_c = -1;
        for (int c = box->left; c <= box->right; ++c) {
            if (!img.at(r, c)) continue;
            if (min_c < 0) min_c = c;
            max_c = c;
        }
        if (min_c >= 0 && col_denom > 0.0) {
            out.values[22 + i] = (min_c - box->left) / col_denom;
            out.values[33 + i] = (max_c - box->left) / col_denom;
        }
    }
    return out;
}

std::array<std::size_t, 4> longest_run_sums(const BinaryImage& img, int top,
                                            int left, int bottom, int right) {
    std::array<std::size_t, 4> sums{0, 0, 0, 0};
    auto scan = [&img, &sums](int axis, int r, int c, int dr, int dc, int r0,
                              int c0, int r1, int c1) {
        std::size_t longest = 0, run = 0;
        while (r >= r0 && r <= r1 && c >= c0 && c <= c1) {
            if (img.at(r, c)) {
                ++run;
                longest = std::max(longest, run);
            } else {
                run = 0;
            }
            r += dr;
            c += dc;
        }
        sums[axis] += longest;
    };
    for (int r = top; r <= bottom; ++r)
        scan(0, r, left, 0, 1, top, left, bottom, right);
    for (int c = left; c <= right; ++c)
        scan(1, top, c, 1, 0, top, left, bottom, right);
    for (int r = top; r <= bottom; ++r)
        scan(2, r, left, 1, 1, top, left, bottom, right);
    for (int c = left + 1; c <= right; ++c)
        scan(2, top, c, 1, 1, top, left, bottom, right);
    for (int c = left; c <= right; ++c)
        scan(3, top, c, 1, -1, top, left, bottom, right);
    for (int r = top + 1; r <= bottom; ++r)
        scan(3, r, right, 1, -1, top, left, bottom, right);
    return sums;
}

FeatureVector extract_longest_run(const BinaryImage& img, bool normalized) {
    FeatureVector out{FeatureKind::LongestRun, std::vector<double>(100, 0.0)};
    const auto box = object_bbox(img);
    if (!box) return out;

    // Square hull of the bounding box, centered and shifted back inside the
    // image; if the image is narrower than the hull the window just clamps.
    const int side = std::max(box->height(), box->width());
    auto place = [side](int lo, int extent, int limit) {
        int start = lo - (side - extent) / 2;
        start = std::min(start, limit - side);
        start = std::max(start, 0);
        return start;
    };
    const int hull_top = place(box->top, box->height(), img.height);
    const int hull_left = place(box->left, box->width(), img.width);
    const int hull_bottom = std::min(hull_top + side, img.height) - 1;
    const int hull_right = std::min(hull_left + side, img.width) - 1;
    const int hull_h = hull_bottom - hull_top + 1;
    const int hull_w = hull_right - hull_left + 1;

    for (int i = 0; i < 5; ++i) {
        const int r0 = hull_top + i * hull_h / 5;
        const int r1 = hull_top + (i + 1) * hull_h / 5 - 1;
        for (int j = 0; j < 5; ++j) {
            const int c0 = hull_left + j * hull_w / 5;
            const int c1 = hull_left + (j + 1) * hull_w / 5 - 1;
            if (r1 < r0 || c1 < c0) continue;
            const auto sums = longest_run_sums(img, r0, c0, r1, c1);
            const double area = static_cast<double>(r1 - r0 + 1) * (c1 - c0 + 1);
            const std::size_t base = static_cast<std::size_t>(i * 5 + j) * 4;
            for (int k = 0; k < 4; ++k) {
                out.values[base + k] =
                    normalized ? sums[k] / area : static_cast<double>(sums[k]);
            }
        }
    }
    return out;
}

FeatureVector extract(FeatureKind kind, const BinaryImage& img) {
    switch (kind) {
        case FeatureKind::Shadow: return extract_shadow(img);
        case FeatureKind::ChainHistogram: return extract_chain_histogram(img);
        case FeatureKind::ViewBased: return extract_views(img);
        case FeatureKind::LongestRun: return extract_longest_run(img);
    }
    throw InvalidArgument("extract: bad feature kind");
}

}  // namespace glyphrec
