#include "glyphrec/image.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "glyphrec/errors.hpp"

namespace glyphrec {

std::optional<BBox> object_bbox(const BinaryImage& img) {
    int top = img.height, left = img.width, bottom = -1, right = -1;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            if (!img.at(r, c)) continue;
            if (r < top) top = r;
            if (r > bottom) bottom = r;
            if (c < left) left = c;
            if (c > right) right = c;
        }
    }
    if (bottom < 0) return std::nullopt;
    return BBox{top, left, bottom, right};
}

namespace {

// Pulls the next header token, treating '#' as a to-end-of-line comment.
std::string next_token(const std::string& data, std::size_t& pos) {
    while (pos < data.size()) {
        char ch = data[pos];
        if (ch == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            ++pos;
        } else {
            break;
        }
    }
    std::size_t start = pos;
    while (pos < data.size() &&
           !std::isspace(static_cast<unsigned char>(data[pos])) &&
           data[pos] != '#') {
        ++pos;
    }
    return data.substr(start, pos - start);
}

int parse_header_int(const std::string& data, std::size_t& pos, const char* what) {
    std::string tok = next_token(data, pos);
    if (tok.empty()) throw FormatError(std::string("pgm: missing ") + what);
    int value = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9')
            throw FormatError(std::string("pgm: bad ") + what + " '" + tok + "'");
        value = value * 10 + (ch - '0');
        if (value > 1000000) throw FormatError(std::string("pgm: oversized ") + what);
    }
    return value;
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();

    std::size_t pos = 0;
    const std::string magic = next_token(data, pos);
    if (magic != "P2" && magic != "P5")
        throw FormatError("pgm: unsupported magic '" + magic + "' in " + path);
    const int width = parse_header_int(data, pos, "width");
    const int height = parse_header_int(data, pos, "height");
    const int maxval = parse_header_int(data, pos, "maxval");
    if (width < 1 || height < 1)
        throw FormatError("pgm: bad dimensions in " + path);
    if (maxval < 1 || maxval > 255)
        throw FormatError("pgm: only 8-bit maxval supported, got " +
                          std::to_string(maxval) + " in " + path);

    GrayImage img(width, height);
    const std::size_t count = img.pixels.size();
    if (magic == "P5") {
        // Exactly one whitespace byte separates the header from the raster.
        if (pos >= data.size() ||
            !std::isspace(static_cast<unsigned char>(data[pos])))
            throw FormatError("pgm: missing raster separator in " + path);
        ++pos;
        if (data.size() - pos < count)
            throw FormatError("pgm: truncated raster in " + path);
        for (std::size_t i = 0; i < count; ++i)
            img.pixels[i] = static_cast<std::uint8_t>(data[pos + i]);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            int v = parse_header_int(data, pos, "pixel");
            if (v > 255) throw FormatError("pgm: pixel value out of range in " + path);
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

void save_pgm(const std::string& path, const GrayImage& img, bool ascii) {
    if (img.width < 1 || img.height < 1) throw EmptyImage("save_pgm: empty image");
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        if (ascii) {
            out << "P2\n" << img.width << " " << img.height << "\n255\n";
            for (int r = 0; r < img.height; ++r) {
                for (int c = 0; c < img.width; ++c) {
                    out << int(img.at(r, c)) << (c + 1 == img.width ? '\n' : ' ');
                }
            }
        } else {
            out << "P5\n" << img.width << " " << img.height << "\n255\n";
            out.write(reinterpret_cast<const char*>(img.pixels.data()),
                      static_cast<std::streamsize>(img.pixels.size()));
        }
        if (!out) throw IoError("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("rename to " + path + " failed: " + ec.message());
    }
}

GrayImage to_gray(const BinaryImage& img) {
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = img.pixels[i] ? 0 : 255;
    return out;
}

int otsu_threshold(const GrayImage& img) {
    if (img.pixels.empty()) throw EmptyImage("otsu_threshold: empty image");
    std::array<std::size_t, 256> hist{};
    for (auto p : img.pixels) ++hist[p];
    const double total = static_cast<double>(img.pixels.size());

    // Candidate t splits intensities into [0,t) and [t,255]. Classes with no
    // pixels give zero variance, so a constant image keeps the first t.
    double best_var = -1.0;
    int best_t = 1;
    std::size_t count0 = 0;
    double sum0 = 0.0;
    double sum_all = 0.0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[v];
    for (int t = 1; t <= 255; ++t) {
        count0 += hist[t - 1];
        sum0 += static_cast<double>(t - 1) * hist[t - 1];
        const std::size_t count1 = img.pixels.size() - count0;
        double var = 0.0;
        if (count0 > 0 && count1 > 0) {
            const double w0 = count0 / total;
            const double w1 = count1 / total;
            const double mu0 = sum0 / count0;
            const double mu1 = (sum_all - sum0) / count1;
            var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        }
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

BinaryImage binarize(const GrayImage& img) {
    const int t = otsu_threshold(img);
    BinaryImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = img.pixels[i] < t ? 1 : 0;
    return out;
}

namespace {

// dst index in [0,size) -> src index in [0,extent): round(dst*(extent-1)/(size-1)).
int sample_index(int dst, int extent, int size) {
    if (size <= 1 || extent <= 1) return 0;
    const long long a = static_cast<long long>(dst) * (extent - 1);
    return static_cast<int>((2 * a + (size - 1)) / (2LL * (size - 1)));
}

BinaryImage scale_box_to(const BinaryImage& img, const BBox& box, int size) {
    BinaryImage out(size, size);
    std::vector<int> col_map(static_cast<std::size_t>(size));
    for (int c = 0; c < size; ++c)
        col_map[c] = box.left + sample_index(c, box.width(), size);
    for (int r = 0; r < size; ++r) {
        const int sr = box.top + sample_index(r, box.height(), size);
        for (int c = 0; c < size; ++c)
            out.set(r, c, img.at(sr, col_map[c]));
    }
    return out;
}

}  // namespace

BinaryImage normalize(const BinaryImage& img, int size) {
    if (size < 1) throw InvalidArgument("normalize: size must be positive");
    auto box = object_bbox(img);
    if (!box) throw EmptyImage("normalize: no object pixels");
    BinaryImage out = scale_box_to(img, *box, size);
    // Downscaling can sample past every object pixel of a box edge. One
    // more pass is enough: its input box fits inside size x size, and
    // upscaling is surjective onto source pixels.
    auto out_box = object_bbox(out);
    if (!(out_box == BBox{0, 0, size - 1, size - 1}))
        out = scale_box_to(out, *out_box, size);
    return out;
}

BinaryImage thin(const BinaryImage& img) {
    BinaryImage cur = img;
    auto px = [&cur](int r, int c) -> int {
        return cur.in_bounds(r, c) && cur.at(r, c) ? 1 : 0;
    };
    std::vector<std::pair<int, int>> kill;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int phase = 0; phase < 2; ++phase) {
            kill.clear();
            for (int r = 0; r < cur.height; ++r) {
                for (int c = 0; c < cur.width; ++c) {
                    if (!cur.at(r, c)) continue;
                    // Neighborhood in Zhang-Suen order P2..P9 = N NE E SE S SW W NW.
                    const int p2 = px(r - 1, c), p3 = px(r - 1, c + 1);
                    const int p4 = px(r, c + 1), p5 = px(r + 1, c + 1);
                    const int p6 = px(r + 1, c), p7 = px(r + 1, c - 1);
                    const int p8 = px(r, c - 1), p9 = px(r - 1, c - 1);
                    const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
                    if (b < 2 || b > 6) continue;
                    const int a = (p2 == 0 && p3 == 1) + (p3 == 0 && p4 == 1) +
                                  (p4 == 0 && p5 == 1) + (p5 == 0 && p6 == 1) +
                                  (p6 == 0 && p7 == 1) + (p7 == 0 && p8 == 1) +
                                  (p8 == 0 && p9 == 1) + (p9 == 0 && p2 == 1);
                    if (a != 1) continue;
                    if (phase == 0) {
                        if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
                    } else {
                        if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
                    }
                    kill.emplace_back(r, c);
                }
            }
            for (auto [r, c] : kill) cur.set(r, c, false);
            if (!kill.empty()) changed = true;
        }
    }
    return cur;
}

std::vector<std::pair<int, int>> contour_points(const BinaryImage& img) {
    std::vector<std::pair<int, int>> pts;
    auto background = [&img](int r, int c) {
        return !img.in_bounds(r, c) || !img.at(r, c);
    };
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            if (!img.at(r, c)) continue;
            if (background(r - 1, c) || background(r + 1, c) ||
                background(r, c - 1) || background(r, c + 1)) {
                pts.emplace_back(r, c);
            }
        }
    }
    return pts;
}

std::vector<ContourChain> trace_chains(const BinaryImage& img) {
    const auto pts = contour_points(img);
    const int w = img.width;
    const std::size_t cells = static_cast<std::size_t>(w) * img.height;
    std::vector<std::uint8_t> is_contour(cells, 0);
    for (auto [r, c] : pts) is_contour[static_cast<std::size_t>(r) * w + c] = 1;

    std::vector<int> owner(cells, -1);
    // Per-chain record of emitted (position, direction) steps, reused across
    // chains via an epoch stamp.
    std::vector<int> step_epoch(cells, -1);
    std::vector<std::uint8_t> step_mask(cells, 0);

    std::vector<ContourChain> chains;
    for (auto [sr, sc] : pts) {
        const std::size_t seed_idx = static_cast<std::size_t>(sr) * w + sc;
        if (owner[seed_idx] != -1) continue;
        const int chain_id = static_cast<int>(chains.size());
        owner[seed_idx] = chain_id;
        ContourChain chain{sr, sc, {}};

        int r = sr, c = sc;
        int prev = 0;  // East sentinel: the first scan starts just after west.
        for (;;) {
            const int rev = (prev + 4) & 7;
            int chosen = -1, tr = 0, tc = 0;
            // Clockwise scan; the straight-back direction is tried last.
            for (int k = 1; k <= 8; ++k) {
                const int d = (rev - k + 8) & 7;
                const int nr = r + kChainRowStep[d];
                const int nc = c + kChainColStep[d];
                if (!img.in_bounds(nr, nc)) continue;
                const std::size_t nidx = static_cast<std::size_t>(nr) * w + nc;
                if (!is_contour[nidx]) continue;
                if (owner[nidx] != -1 && owner[nidx] != chain_id) continue;
                chosen = d;
                tr = nr;
                tc = nc;
                break;
            }
            if (chosen < 0) break;
            const std::size_t idx = static_cast<std::size_t>(r) * w + c;
            if (step_epoch[idx] == chain_id && (step_mask[idx] >> chosen) & 1)
                break;  // the tour is about to repeat itself
            if (step_epoch[idx] != chain_id) {
                step_epoch[idx] = chain_id;
                step_mask[idx] = 0;
            }
            step_mask[idx] |= static_cast<std::uint8_t>(1u << chosen);
            chain.codes.push_back(static_cast<std::uint8_t>(chosen));
            owner[static_cast<std::size_t>(tr) * w + tc] = chain_id;
            r = tr;
            c = tc;
            prev = chosen;
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

}  // namespace glyphrec
