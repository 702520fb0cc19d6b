#include "glyphrec/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glyphrec/errors.hpp"

namespace glyphrec {

FusionWeights reference_fusion_weights() {
    FusionWeights w;
    w.weights[static_cast<int>(FeatureKind::Shadow)] = 0.303;
    w.weights[static_cast<int>(FeatureKind::ChainHistogram)] = 0.316;
    w.weights[static_cast<int>(FeatureKind::ViewBased)] = 0.241;
    w.weights[static_cast<int>(FeatureKind::LongestRun)] = 0.140;
    return w;
}

FusionWeights derive_weights(const std::array<double, 4>& expert_accuracies) {
    double total = 0.0;
    for (double d : expert_accuracies) {
        if (d < 0.0) throw InvalidArgument("derive_weights: negative accuracy");
        total += d;
    }
    if (total <= 0.0)
        throw AllZeroAccuracies("derive_weights: all accuracies are zero");
    FusionWeights w;
    for (int k = 0; k < 4; ++k) w.weights[k] = expert_accuracies[k] / total;
    return w;
}

namespace {

std::size_t checked_class_count(const std::array<ExpertDecision, 4>& decisions) {
    const std::size_t n = decisions[0].scores.values.size();
    if (n == 0) throw InvalidArgument("fusion: empty score vectors");
    bool seen[4] = {false, false, false, false};
    for (const auto& d : decisions) {
        if (d.scores.values.size() != n)
            throw DimensionMismatch("fusion: expert score lengths differ");
        if (d.label < 0 || d.label >= static_cast<int>(n))
            throw BadLabel("fusion: expert label out of range");
        const int k = static_cast<int>(d.expert);
        if (seen[k]) throw InvalidArgument("fusion: duplicate expert kind");
        seen[k] = true;
    }
    return n;
}

void check_weights(const FusionWeights& w) {
    double total = 0.0;
    for (double v : w.weights) {
        if (v < 0.0) throw InvalidArgument("fusion: negative weight");
        total += v;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw InvalidArgument("fusion: weights must sum to 1");
}

std::vector<double> summed_scores(const std::array<ExpertDecision, 4>& decisions,
                                  std::size_t n) {
    std::vector<double> sum(n, 0.0);
    for (const auto& d : decisions)
        for (std::size_t i = 0; i < n; ++i) sum[i] += d.scores.values[i];
    return sum;
}

// Classes ordered by primary score, then by the soft-score tie key, then by
// lowest index.
std::vector<int> rank_classes(const std::vector<double>& primary,
                              const std::vector<double>& tie_key) {
    std::vector<int> order(primary.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (primary[a] != primary[b]) return primary[a] > primary[b];
        if (tie_key[a] != tie_key[b]) return tie_key[a] > tie_key[b];
        return a < b;
    });
    return order;
}

}  // namespace

std::vector<int> candidate_labels(const std::array<ExpertDecision, 4>& decisions) {
    checked_class_count(decisions);
    std::vector<int> labels;
    for (const auto& d : decisions) labels.push_back(d.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

FusedDecision fuse_unanimous(const std::array<ExpertDecision, 4>& decisions) {
    const std::size_t n = checked_class_count(decisions);
    FusedDecision out;
    out.combined = summed_scores(decisions, n);
    out.ranking = rank_classes(out.combined, out.combined);
    const int first = decisions[0].label;
    const bool agree = std::all_of(decisions.begin(), decisions.end(),
                                   [first](const ExpertDecision& d) {
                                       return d.label == first;
                                   });
    out.top1 = agree ? first : kRejected;
    return out;
}

FusedDecision fuse_any(const std::array<ExpertDecision, 4>& decisions) {
    const std::size_t n = checked_class_count(decisions);
    FusedDecision out;
    out.combined = summed_scores(decisions, n);
    out.ranking = rank_classes(out.combined, out.combined);
    int best = -1;
    for (int label : candidate_labels(decisions)) {
        if (best < 0 || out.combined[label] > out.combined[best]) best = label;
    }
    out.top1 = best;
    return out;
}

FusedDecision fuse_weighted(const std::array<ExpertDecision, 4>& decisions,
                            const FusionWeights& weights, WeightedMode mode) {
    const std::size_t n = checked_class_count(decisions);
    check_weights(weights);
    FusedDecision out;
    out.combined.assign(n, 0.0);
    for (const auto& d : decisions) {
        const double w = weights.of(d.expert);
        if (mode == WeightedMode::BinaryVotes) {
            out.combined[d.label] += w;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                out.combined[i] += w * d.scores.values[i];
        }
    }
    out.ranking = rank_classes(out.combined, summed_scores(decisions, n));
    // The decision follows the ranking's tie-break, not a bare argmax.
    out.top1 = out.ranking.front();
    return out;
}

}  // namespace glyphrec
