#ifndef GLYPHREC_TESTS_HELPERS_HPP
#define GLYPHREC_TESTS_HELPERS_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "glyphrec/image.hpp"
#include "glyphrec/mlp.hpp"

namespace testutil {

// Self-deleting scratch directory, unique per instance.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("glyphrec-test-" + std::to_string(counter.fetch_add(1)) + "-" +
                std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str(const std::string& name) const { return (path / name).string(); }
};

inline glyphrec::BinaryImage random_binary(std::mt19937& rng, int width,
                                           int height, double density) {
    glyphrec::BinaryImage img(width, height);
    std::bernoulli_distribution flip(density);
    for (auto& p : img.pixels) p = flip(rng) ? 1 : 0;
    return img;
}

inline glyphrec::BinaryImage solid(int width, int height) {
    return glyphrec::BinaryImage(width, height, 1);
}

// Zhang-Suen reference, transcribed directly from the two-subiteration
// rules with named neighbors. Production code is structured around offset
// tables; this one spells the conditions out so the two can disagree.
inline glyphrec::BinaryImage reference_thin(const glyphrec::BinaryImage& input) {
    glyphrec::BinaryImage img = input;
    // p[0..7] = P2..P9 = N, NE, E, SE, S, SW, W, NW.
    static constexpr int dr[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    static constexpr int dc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    bool changed = true;
    while (changed) {
        changed = false;
        for (int phase = 0; phase < 2; ++phase) {
            std::vector<std::pair<int, int>> kill;
            for (int r = 0; r < img.height; ++r) {
                for (int c = 0; c < img.width; ++c) {
                    if (!img.at(r, c)) continue;
                    bool p[8];
                    int b = 0;
                    for (int k = 0; k < 8; ++k) {
                        p[k] = img.in_bounds(r + dr[k], c + dc[k]) &&
                               img.at(r + dr[k], c + dc[k]);
                        b += p[k];
                    }
                    if (b < 2 || b > 6) continue;
                    int a = 0;
                    for (int k = 0; k < 8; ++k) a += (!p[k] && p[(k + 1) % 8]);
                    if (a != 1) continue;
                    const bool n = p[0], e = p[2], s = p[4], w = p[6];
                    const bool cond1 = phase == 0 ? !(n && e && s) : !(n && e && w);
                    const bool cond2 = phase == 0 ? !(e && s && w) : !(n && s && w);
                    if (cond1 && cond2) kill.emplace_back(r, c);
                }
            }
            for (auto [r, c] : kill) img.set(r, c, false);
            changed = changed || !kill.empty();
        }
    }
    return img;
}

// Longest-run reference that materializes every scan line of the window
// explicitly instead of walking seeded rays.
inline std::array<std::size_t, 4> brute_longest_run_sums(
    const glyphrec::BinaryImage& img, int top, int left, int bottom, int right) {
    auto longest = [](const std::vector<char>& line) {
        std::size_t best = 0, run = 0;
        for (char v : line) {
            run = v ? run + 1 : 0;
            best = std::max(best, run);
        }
        return best;
    };
    std::array<std::size_t, 4> sums{0, 0, 0, 0};
    for (int r = top; r <= bottom; ++r) {
        std::vector<char> line;
        for (int c = left; c <= right; ++c) line.push_back(img.at(r, c));
        sums[0] += longest(line);
    }
    for (int c = left; c <= right; ++c) {
        std::vector<char> line;
        for (int r = top; r <= bottom; ++r) line.push_back(img.at(r, c));
        sums[1] += longest(line);
    }
    // Diagonals hold c - r fixed, anti-diagonals hold r + c fixed.
    for (int d = left - bottom; d <= right - top; ++d) {
        std::vector<char> line;
        for (int r = top; r <= bottom; ++r) {
            const int c = r + d;
            if (c >= left && c <= right) line.push_back(img.at(r, c));
        }
        sums[2] += longest(line);
    }
    for (int s = top + left; s <= bottom + right; ++s) {
        std::vector<char> line;
        for (int r = top; r <= bottom; ++r) {
            const int c = s - r;
            if (c >= left && c <= right) line.push_back(img.at(r, c));
        }
        sums[3] += longest(line);
    }
    return sums;
}

// Central finite differences of the half squared error over every
// parameter, for checking the analytic backpropagation gradient.
inline glyphrec::MlpGradient numeric_gradient(const glyphrec::MlpModel& model,
                                              const std::vector<double>& x,
                                              const std::vector<double>& target,
                                              double h = 1e-5) {
    auto loss_at = [&x, &target](const glyphrec::MlpModel& m) {
        const auto y = glyphrec::forward(m, x);
        double e = 0.0;
        for (std::size_t j = 0; j < y.values.size(); ++j) {
            const double d = target[j] - y.values[j];
            e += 0.5 * d * d;
        }
        return e;
    };
    glyphrec::MlpModel probe = model;
    auto differentiate = [&](std::vector<double>& params,
                             std::vector<double>& out) {
        out.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double keep = params[i];
            params[i] = keep + h;
            const double up = loss_at(probe);
            params[i] = keep - h;
            const double down = loss_at(probe);
            params[i] = keep;
            out[i] = (up - down) / (2.0 * h);
        }
    };
    glyphrec::MlpGradient g;
    differentiate(probe.w1, g.w1);
    differentiate(probe.b1, g.b1);
    differentiate(probe.w2, g.w2);
    differentiate(probe.b2, g.b2);
    return g;
}

inline double max_relative_gradient_error(const glyphrec::MlpGradient& analytic,
                                          const glyphrec::MlpGradient& numeric) {
    double worst = 0.0;
    auto compare = [&worst](const std::vector<double>& a,
                            const std::vector<double>& n) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double scale = std::max(1e-6, std::abs(a[i]) + std::abs(n[i]));
            worst = std::max(worst, std::abs(a[i] - n[i]) / scale);
        }
    };
    compare(analytic.w1, numeric.w1);
    compare(analytic.b1, numeric.b1);
    compare(analytic.w2, numeric.w2);
    compare(analytic.b2, numeric.b2);
    return worst;
}

}  // namespace testutil

#endif  // GLYPHREC_TESTS_HELPERS_HPP
