#ifndef GLYPHREC_MLP_HPP
#define GLYPHREC_MLP_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace glyphrec {

// One feature vector paired with its class label.
struct LabeledSample {
    std::vector<double> x;
    int label = 0;
};

struct MlpConfig {
    int input_dim = 0;
    int hidden_dim = 40;
    int output_dim = 49;
    double learning_rate = 0.8;
    double momentum = 0.7;
    int epochs = 50;
    std::uint64_t seed = 0;

    bool operator==(const MlpConfig&) const = default;
};

// Three-layer perceptron with sigmoid units on both layers. Matrices are
// row-major: w1 is hidden_dim x input_dim, w2 is output_dim x hidden_dim.
struct MlpModel {
    MlpConfig config;
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    std::vector<double> b2;

    bool operator==(const MlpModel&) const = default;
};

struct SoftScores {
    std::vector<double> values;
};

// Gradient of the half squared error, same shapes as the model parameters.
// Doubles as the velocity buffer for momentum updates.
struct MlpGradient {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    std::vector<double> b2;
};

// Parameters drawn uniformly from [-0.5, 0.5) in the order w1, b1, w2, b2.
MlpModel init_mlp(const MlpConfig& cfg);

SoftScores forward(const MlpModel& model, const std::vector<double>& x);

// Exact analytic gradient of E = 1/2 * sum_j (target_j - y_j)^2.
MlpGradient gradient(const MlpModel& model, const std::vector<double>& x,
                     const std::vector<double>& target);

// One online update: delta = -lr * grad + momentum * velocity, applied in
// place; velocity keeps the applied delta.
void apply_update(MlpModel& model, const MlpGradient& grad, MlpGradient& velocity);

// Online backpropagation with momentum over cfg.epochs epochs, samples
// reshuffled each epoch by the seeded engine that also drew the initial
// weights. epoch_loss, when given, records the summed pre-update half
// squared error per epoch.
MlpModel train_mlp(const std::vector<LabeledSample>& data, const MlpConfig& cfg,
                   std::vector<double>* epoch_loss = nullptr);

// Argmax of the forward scores, ties resolved to the lowest class index.
std::pair<int, SoftScores> predict(const MlpModel& model,
                                   const std::vector<double>& x);

}  // namespace glyphrec

#endif  // GLYPHREC_MLP_HPP
