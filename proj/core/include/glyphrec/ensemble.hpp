#ifndef GLYPHREC_ENSEMBLE_HPP
#define GLYPHREC_ENSEMBLE_HPP

#include <array>
#include <vector>

#include "glyphrec/features.hpp"
#include "glyphrec/mlp.hpp"

namespace glyphrec {

// The verdict of one feature-wise expert on one sample.
struct ExpertDecision {
    FeatureKind expert = FeatureKind::Shadow;
    int label = 0;  // argmax of scores
    SoftScores scores;
};

// Per-expert fusion weights, indexed by FeatureKind. Non-negative, summing
// to 1 within 1e-9.
struct FusionWeights {
    std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};

    double of(FeatureKind k) const { return weights[static_cast<int>(k)]; }
    bool operator==(const FusionWeights&) const = default;
};

// Published reference weights: chain-histogram 0.316, shadow 0.303,
// view-based 0.241, longest-run 0.140.
FusionWeights reference_fusion_weights();

// Weights proportional to per-expert accuracies.
FusionWeights derive_weights(const std::array<double, 4>& expert_accuracies);

inline constexpr int kRejected = -1;

struct FusedDecision {
    int top1 = kRejected;
    std::vector<int> ranking;      // classes by combined score, best first
    std::vector<double> combined;  // one score per class

    bool operator==(const FusedDecision&) const = default;
};

// Sorted distinct labels proposed by the four experts. The evaluation
// harness scores any-vote fusion by membership in this set.
std::vector<int> candidate_labels(const std::array<ExpertDecision, 4>& decisions);

// All four experts must agree, otherwise the sample is rejected. Combined
// scores (and the ranking) are the summed soft scores either way.
FusedDecision fuse_unanimous(const std::array<ExpertDecision, 4>& decisions);

// Candidates are the distinct expert labels; the best-scoring candidate by
// summed soft score wins. Combined scores are the summed soft scores.
FusedDecision fuse_any(const std::array<ExpertDecision, 4>& decisions);

enum class WeightedMode { BinaryVotes, SoftScores };

// Weighted majority: combined_i = sum_k w_k * d_ik where d_ik is 1 for the
// expert's label (BinaryVotes) or its soft score (SoftScores). The ranking
// orders by combined score, breaking ties by summed soft score and then by
// lowest class index, so binary votes still produce a meaningful top-5.
FusedDecision fuse_weighted(const std::array<ExpertDecision, 4>& decisions,
                            const FusionWeights& weights,
                            WeightedMode mode = WeightedMode::BinaryVotes);

}  // namespace glyphrec

#endif  // GLYPHREC_ENSEMBLE_HPP
