#ifndef GLYPHREC_SVM_HPP
#define GLYPHREC_SVM_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "glyphrec/mlp.hpp"

namespace glyphrec {

struct Kernel {
    enum class Tag { Linear, Rbf, Poly };
    Tag tag = Tag::Linear;
    double sigma = 1.0;  // Rbf width
    int degree = 2;      // Poly exponent

    bool operator==(const Kernel&) const = default;
};

std::string to_string(Kernel::Tag tag);
Kernel::Tag kernel_tag_from_string(const std::string& name);

// Default Rbf width for d-dimensional inputs.
inline double default_sigma(int dim) { return std::sqrt(static_cast<double>(dim)) / 2.0; }

// Linear x.y; Rbf exp(-|x-y|^2 / (2 sigma^2)); Poly (x.y + 1)^degree.
double kernel_eval(const Kernel& k, const std::vector<double>& x,
                   const std::vector<double>& y);

// One binary soft-margin machine. coefficients holds alpha_i * y_i per
// stored support vector; only alphas above 1e-8 are kept.
struct SvmBinaryModel {
    Kernel kernel;
    double c = 1.0;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coefficients;
    double bias = 0.0;

    bool operator==(const SvmBinaryModel&) const = default;
};

// f(x) = sum_i coefficients[i] * K(sv_i, x) + bias.
double decision(const SvmBinaryModel& m, const std::vector<double>& x);

// Sequential minimal optimization. Labels must be -1 or +1. The run is
// deterministic: outer sweeps in index order, the partner is chosen by
// largest |E1-E2| with ties to the lowest index, then round-robin fallbacks
// from the next index. When objective_trace is given it receives the dual
// objective after every outer pass, and the trainer verifies the trace
// never decreases. alphas_out, when given, receives the full multiplier
// vector for optimality audits.
SvmBinaryModel train_binary(const std::vector<LabeledSample>& data,
                            const Kernel& kernel, double c, double tol = 1e-3,
                            std::vector<double>* objective_trace = nullptr,
                            std::vector<double>* alphas_out = nullptr);

// Counts samples violating the soft-margin optimality conditions at tol:
// alpha=0 needs y*f >= 1-tol, 0<alpha<c needs |y*f - 1| <= tol, alpha=c
// needs y*f <= 1+tol.
int kkt_violation_count(const SvmBinaryModel& m,
                        const std::vector<LabeledSample>& data,
                        const std::vector<double>& alphas, double tol);

enum class MulticlassScheme { OneVsRest, OneVsOne };

std::string to_string(MulticlassScheme scheme);

// negative_class
//  >= 0: one-vs-one machine, positive_class against negative_class;
//  -1: one-vs-rest machine for positive_class.
struct SvmMachine {
    int positive_class = 0;
    int negative_class = -1;
    SvmBinaryModel model;

    bool operator==(const SvmMachine&) const = default;
};

struct SvmModel {
    MulticlassScheme scheme = MulticlassScheme::OneVsRest;
    int num_classes = 49;
    std::vector<SvmMachine> machines;

    bool operator==(const SvmModel&) const = default;
    std::size_t support_vector_count() const {
        std::size_t n = 0;
        for (const auto& m : machines) n += m.model.support_vectors.size();
        return n;
    }
};

// Machines cover the classes present in data, in ascending class order
// (ascending pairs for one-vs-one), trained independently in parallel.
SvmModel train_multiclass(const std::vector<LabeledSample>& data,
                          MulticlassScheme scheme, const Kernel& kernel, double c,
                          int num_classes = 49, double tol = 1e-3);

// One-vs-rest: label with the largest decision value, scores are decision
// values (absent classes stay at the lowest representable value).
// One-vs-one: label with most pairwise votes, ties by summed decision
// values then lowest index; scores are vote counts.
std::pair<int, std::vector<double>> predict(const SvmModel& model,
                                            const std::vector<double>& x);

// Grid search: the c maximizing top-1 accuracy on the selection split,
// smallest c on ties.
double select_c(const std::vector<LabeledSample>& train,
                const std::vector<LabeledSample>& selection,
                const std::vector<double>& grid, const Kernel& kernel,
                MulticlassScheme scheme, int num_classes = 49, double tol = 1e-3);

}  // namespace glyphrec

#endif  // GLYPHREC_SVM_HPP
