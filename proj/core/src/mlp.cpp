#include "glyphrec/mlp.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "glyphrec/errors.hpp"
#include "glyphrec/rng.hpp"

namespace glyphrec {

namespace {

void check_config(const MlpConfig& cfg) {
    if (cfg.input_dim < 1 || cfg.hidden_dim < 1 || cfg.output_dim < 1)
        throw ConfigInvalid("mlp: dimensions must be positive");
    if (cfg.learning_rate <= 0.0)
        throw ConfigInvalid("mlp: learning rate must be positive");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
        throw ConfigInvalid("mlp: momentum must be in [0,1)");
    if (cfg.epochs < 0) throw ConfigInvalid("mlp: negative epoch count");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> hidden_activations(const MlpModel& m,
                                       const std::vector<double>& x) {
    const auto& cfg = m.config;
    std::vector<double> h(static_cast<std::size_t>(cfg.hidden_dim));
    for (int k = 0; k < cfg.hidden_dim; ++k) {
        double z = m.b1[k];
        const double* row = m.w1.data() + static_cast<std::size_t>(k) * cfg.input_dim;
        for (int i = 0; i < cfg.input_dim; ++i) z += row[i] * x[i];
        h[k] = sigmoid(z);
    }
    return h;
}

std::vector<double> output_activations(const MlpModel& m,
                                       const std::vector<double>& h) {
    const auto& cfg = m.config;
    std::vector<double> y(static_cast<std::size_t>(cfg.output_dim));
    for (int j = 0; j < cfg.output_dim; ++j) {
        double z = m.b2[j];
        const double* row = m.w2.data() + static_cast<std::size_t>(j) * cfg.hidden_dim;
        for (int k = 0; k < cfg.hidden_dim; ++k) z += row[k] * h[k];
        y[j] = sigmoid(z);
    }
    return y;
}

}  // namespace

MlpModel init_mlp(const MlpConfig& cfg) {
    check_config(cfg);
    MlpModel m;
    m.config = cfg;
    Rng rng(cfg.seed);
    auto fill = [&rng](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (auto& e : v) e = rng.next_double(-0.5, 0.5);
    };
    fill(m.w1, static_cast<std::size_t>(cfg.hidden_dim) * cfg.input_dim);
    fill(m.b1, static_cast<std::size_t>(cfg.hidden_dim));
    fill(m.w2, static_cast<std::size_t>(cfg.output_dim) * cfg.hidden_dim);
    fill(m.b2, static_cast<std::size_t>(cfg.output_dim));
    return m;
}

SoftScores forward(const MlpModel& model, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != model.config.input_dim)
        throw DimensionMismatch("mlp forward: input has " +
                                std::to_string(x.size()) + " values, expected " +
                                std::to_string(model.config.input_dim));
    return SoftScores{output_activations(model, hidden_activations(model, x))};
}

MlpGradient gradient(const MlpModel& model, const std::vector<double>& x,
                     const std::vector<double>& target) {
    const auto& cfg = model.config;
    if (static_cast<int>(x.size()) != cfg.input_dim)
        throw DimensionMismatch("mlp gradient: bad input size");
    if (static_cast<int>(target.size()) != cfg.output_dim)
        throw DimensionMismatch("mlp gradient: bad target size");

    const auto h = hidden_activations(model, x);
    const auto y = output_activations(model, h);

    MlpGradient g;
    g.w1.assign(model.w1.size(), 0.0);
    g.b1.assign(model.b1.size(), 0.0);
    g.w2.assign(model.w2.size(), 0.0);
    g.b2.assign(model.b2.size(), 0.0);

    std::vector<double> delta2(static_cast<std::size_t>(cfg.output_dim));
    for (int j = 0; j < cfg.output_dim; ++j) {
        delta2[j] = (y[j] - target[j]) * y[j] * (1.0 - y[j]);
        g.b2[j] = delta2[j];
        double* row = g.w2.data() + static_cast<std::size_t>(j) * cfg.hidden_dim;
        for (int k = 0; k < cfg.hidden_dim; ++k) row[k] = delta2[j] * h[k];
    }
    for (int k = 0; k < cfg.hidden_dim; ++k) {
        double back = 0.0;
        for (int j = 0; j < cfg.output_dim; ++j)
            back += delta2[j] * model.w2[static_cast<std::size_t>(j) * cfg.hidden_dim + k];
        const double delta1 = back * h[k] * (1.0 - h[k]);
        g.b1[k] = delta1;
        double* row = g.w1.data() + static_cast<std::size_t>(k) * cfg.input_dim;
        for (int i = 0; i < cfg.input_dim; ++i) row[i] = delta1 * x[i];
    }
    return g;
}

void apply_update(MlpModel& model, const MlpGradient& grad, MlpGradient& velocity) {
    const double lr = model.config.learning_rate;
    const double mom = model.config.momentum;
    auto step = [lr, mom](std::vector<double>& param, const std::vector<double>& g,
                          std::vector<double>& vel) {
        if (vel.size() != param.size()) vel.assign(param.size(), 0.0);
        for (std::size_t i = 0; i < param.size(); ++i) {
            const double delta = -lr * g[i] + mom * vel[i];
            param[i] += delta;
            vel[i] = delta;
        }
    };
    step(model.w1, grad.w1, velocity.w1);
    step(model.b1, grad.b1, velocity.b1);
    step(model.w2, grad.w2, velocity.w2);
    step(model.b2, grad.b2, velocity.b2);
}

MlpModel train_mlp(const std::vector<LabeledSample>& data, const MlpConfig& cfg,
                   std::vector<double>* epoch_loss) {
    check_config(cfg);
    if (data.empty()) throw EmptyDataset("mlp train: no samples");
    for (const auto& s : data) {
        if (static_cast<int>(s.x.size()) != cfg.input_dim)
            throw DimensionMismatch("mlp train: sample size mismatch");
        if (s.label < 0 || s.label >= cfg.output_dim)
            throw BadLabel("mlp train: label " + std::to_string(s.label) +
                           " outside [0," + std::to_string(cfg.output_dim) + ")");
    }

    // The same engine produces the initial weights and every epoch shuffle,
    // so one seed pins the whole run.
    Rng rng(cfg.seed);
    MlpModel model;
    model.config = cfg;
    auto fill = [&rng](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (auto& e : v) e = rng.next_double(-0.5, 0.5);
    };
    fill(model.w1, static_cast<std::size_t>(cfg.hidden_dim) * cfg.input_dim);
    fill(model.b1, static_cast<std::size_t>(cfg.hidden_dim));
    fill(model.w2, static_cast<std::size_t>(cfg.output_dim) * cfg.hidden_dim);
    fill(model.b2, static_cast<std::size_t>(cfg.output_dim));

    if (epoch_loss) epoch_loss->clear();
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    MlpGradient velocity;
    std::vector<double> target(static_cast<std::size_t>(cfg.output_dim));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss = 0.0;
        for (std::size_t idx : order) {
            const auto& sample = data[idx];
            std::fill(target.begin(), target.end(), 0.0);
            target[sample.label] = 1.0;
            if (epoch_loss) {
                const auto y = forward(model, sample.x).values;
                for (int j = 0; j < cfg.output_dim; ++j)
                    loss += 0.5 * (target[j] - y[j]) * (target[j] - y[j]);
            }
            const auto g = gradient(model, sample.x, target);
            apply_update(model, g, velocity);
        }
        if (epoch_loss) epoch_loss->push_back(loss);
    }
    return model;
}

std::pair<int, SoftScores> predict(const MlpModel& model,
                                   const std::vector<double>& x) {
    SoftScores scores = forward(model, x);
    int best = 0;
    for (std::size_t j = 1; j < scores.values.size(); ++j)
        if (scores.values[j] > scores.values[best]) best = static_cast<int>(j);
    return {best, std::move(scores)};
}

}  // namespace glyphrec
