#include "glyphrec/svm.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

#include "glyphrec/errors.hpp"
#include "glyphrec/parallel.hpp"

namespace glyphrec {

std::string to_string(Kernel::Tag tag) {
    switch (tag) {
        case Kernel::Tag::Linear: return "linear";
        case Kernel::Tag::Rbf: return "rbf";
        case Kernel::Tag::Poly: return "poly";
    }
    return "unknown";
}

Kernel::Tag kernel_tag_from_string(const std::string& name) {
    if (name == "linear") return Kernel::Tag::Linear;
    if (name == "rbf") return Kernel::Tag::Rbf;
    if (name == "poly") return Kernel::Tag::Poly;
    throw InvalidArgument("unknown kernel '" + name + "'");
}

std::string to_string(MulticlassScheme scheme) {
    return scheme == MulticlassScheme::OneVsRest ? "one-vs-rest" : "one-vs-one";
}

double kernel_eval(const Kernel& k, const std::vector<double>& x,
                   const std::vector<double>& y) {
    if (x.size() != y.size())
        throw DimensionMismatch("kernel_eval: vector sizes differ");
    switch (k.tag) {
        case Kernel::Tag::Linear: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
            return dot;
        }
        case Kernel::Tag::Rbf: {
            double d2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] - y[i];
                d2 += d * d;
            }
            return std::exp(-d2 / (2.0 * k.sigma * k.sigma));
        }
        case Kernel::Tag::Poly: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
            double p = 1.0;
            const double base = dot + 1.0;
            for (int e = 0; e < k.degree; ++e) p *= base;
            return p;
        }
    }
    throw InvalidArgument("kernel_eval: bad kernel tag");
}

double decision(const SvmBinaryModel& m, const std::vector<double>& x) {
    double f = m.bias;
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i)
        f += m.coefficients[i] * kernel_eval(m.kernel, m.support_vectors[i], x);
    return f;
}

namespace {

constexpr double kStepEps = 1e-12;
constexpr double kSvThreshold = 1e-8;
constexpr int kMaxPasses = 1000;
constexpr std::size_t kGramLimit = 2048;

class SmoSolver {
public:
    SmoSolver(const std::vector<LabeledSample>& data, const Kernel& kernel,
              double c, double tol)
        : data_(data), kernel_(kernel), c_(c), tol_(tol), n_(data.size()) {
        y_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            y_[i] = static_cast<double>(data[i].label);
        alpha_.assign(n_, 0.0);
        errors_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -y_[i];
        if (n_ <= kGramLimit) {
            gram_.resize(n_ * n_);
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    const double v = kernel_eval(kernel_, data_[i].x, data_[j].x);
                    gram_[i * n_ + j] = v;
                    gram_[j * n_ + i] = v;
                }
            }
        }
    }

    void solve(std::vector<double>* trace) {
        bool examine_all = true;
        int num_changed = 0;
        int passes = 0;
        while ((num_changed > 0 || examine_all) && passes < kMaxPasses) {
            num_changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (examine_all || non_bound(i)) num_changed += examine(i) ? 1 : 0;
            }
            if (trace) {
                const double obj = dual_objective();
                if (!trace->empty() &&
                    obj < trace->back() - 1e-7 * (1.0 + std::fabs(trace->back())))
                    throw Error("smo: dual objective decreased across passes");
                trace->push_back(obj);
            }
            if (examine_all)
                examine_all = false;
            else if (num_changed == 0)
                examine_all = true;
            ++passes;
        }
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return bias_; }

private:
    double kval(std::size_t i, std::size_t j) const {
        if (!gram_.empty()) return gram_[i * n_ + j];
        return kernel_eval(kernel_, data_[i].x, data_[j].x);
    }

    bool non_bound(std::size_t i) const {
        return alpha_[i] > 0.0 && alpha_[i] < c_;
    }

    double dual_objective() const {
        double obj = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] == 0.0) continue;
            obj += alpha_[i];
            for (std::size_t j = 0; j < n_; ++j) {
                if (alpha_[j] == 0.0) continue;
                obj -= 0.5 * alpha_[i] * alpha_[j] * y_[i] * y_[j] * kval(i, j);
            }
        }
        return obj;
    }

    bool examine(std::size_t i2) {
        const double y2 = y_[i2];
        const double alph2 = alpha_[i2];
        const double e2 = errors_[i2];
        const double r2 = e2 * y2;
        const bool violates =
            (r2 < -tol_ && alph2 < c_) || (r2 > tol_ && alph2 > 0.0);
        if (!violates) return false;

        // Largest |E1-E2| over non-bound points, lowest index on ties.
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == i2 || !non_bound(i)) continue;
            const double gap = std::fabs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return true;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i = (i2 + 1 + k) % n_;
            if (non_bound(i) && take_step(i, i2)) return true;
        }
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i = (i2 + 1 + k) % n_;
            if (take_step(i, i2)) return true;
        }
        return false;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double alph1 = alpha_[i1];
        const double alph2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = errors_[i1], e2 = errors_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(c_, c_ + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph1 + alph2 - c_);
            hi = std::min(c_, alph1 + alph2);
        }
        if (hi - lo < kStepEps) return false;

        const double k11 = kval(i1, i1);
        const double k12 = kval(i1, i2);
        const double k22 = kval(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 1e-15) {
            a2 = alph2 + y2 * (e1 - e2) / eta;
            a2 = std::clamp(a2, lo, hi);
        } else {
            // Flat direction: compare the restricted objective at both ends.
            const double f1 = y1 * (e1 - bias_) - alph1 * k11 - s * alph2 * k12;
            const double f2 = y2 * (e2 - bias_) - s * alph1 * k12 - alph2 * k22;
            const double l1 = alph1 + s * (alph2 - lo);
            const double h1 = alph1 + s * (alph2 - hi);
            const double lo_obj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                                  0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double hi_obj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                                  0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (lo_obj < hi_obj - kStepEps)
                a2 = lo;
            else if (lo_obj > hi_obj + kStepEps)
                a2 = hi;
            else
                a2 = alph2;
        }
        if (std::fabs(a2 - alph2) < kStepEps * (a2 + alph2 + kStepEps))
            return false;

        double a1 = alph1 + s * (alph2 - a2);
        a1 = std::clamp(a1, 0.0, c_);

        const double d1 = y1 * (a1 - alph1);
        const double d2 = y2 * (a2 - alph2);
        const double old_bias = bias_;
        const double b1 = old_bias - (e1 + d1 * k11 + d2 * k12);
        const double b2 = old_bias - (e2 + d1 * k12 + d2 * k22);
        if (a1 > 0.0 && a1 < c_)
            bias_ = b1;
        else if (a2 > 0.0 && a2 < c_)
            bias_ = b2;
        else
            bias_ = (b1 + b2) / 2.0;

        alpha_[i1] = a1;
        alpha_[i2] = a2;
        const double bias_shift = bias_ - old_bias;
        for (std::size_t i = 0; i < n_; ++i)
            errors_[i] += d1 * kval(i1, i) + d2 * kval(i2, i) + bias_shift;
        return true;
    }

    const std::vector<LabeledSample>& data_;
    Kernel kernel_;
    double c_;
    double tol_;
    std::size_t n_;
    std::vector<double> y_;
    std::vector<double> alpha_;
    std::vector<double> errors_;
    std::vector<double> gram_;
    double bias_ = 0.0;
};

}  // namespace

SvmBinaryModel train_binary(const std::vector<LabeledSample>& data,
                            const Kernel& kernel, double c, double tol,
                            std::vector<double>* objective_trace,
                            std::vector<double>* alphas_out) {
    if (c <= 0.0) throw NonPositiveC("svm: c must be positive");
    if (data.empty()) throw EmptyDataset("svm: no samples");
    bool has_pos = false, has_neg = false;
    const std::size_t dim = data[0].x.size();
    for (const auto& s : data) {
        if (s.label == 1)
            has_pos = true;
        else if (s.label == -1)
            has_neg = true;
        else
            throw BadLabel("svm: binary labels must be -1 or +1");
        if (s.x.size() != dim)
            throw DimensionMismatch("svm: inconsistent sample dimensions");
    }
    if (!has_pos || !has_neg)
        throw SingleClassData("svm: both labels must be present");

    SmoSolver solver(data, kernel, c, tol);
    solver.solve(objective_trace);
    if (alphas_out) *alphas_out = solver.alphas();

    SvmBinaryModel model;
    model.kernel = kernel;
    model.c = c;
    model.bias = solver.bias();
    const auto& alphas = solver.alphas();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (alphas[i] <= kSvThreshold) continue;
        model.support_vectors.push_back(data[i].x);
        model.coefficients.push_back(alphas[i] * data[i].label);
    }
    return model;
}

int kkt_violation_count(const SvmBinaryModel& m,
                        const std::vector<LabeledSample>& data,
                        const std::vector<double>& alphas, double tol) {
    if (alphas.size() != data.size())
        throw DimensionMismatch("kkt audit: alpha count mismatch");
    int violations = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double yf = data[i].label * decision(m, data[i].x);
        const double a = alphas[i];
        bool ok;
        if (a <= kSvThreshold)
            ok = yf >= 1.0 - tol;
        else if (a >= m.c - kSvThreshold)
            ok = yf <= 1.0 + tol;
        else
            ok = std::fabs(yf - 1.0) <= tol;
        if (!ok) ++violations;
    }
    return violations;
}

SvmModel train_multiclass(const std::vector<LabeledSample>& data,
                          MulticlassScheme scheme, const Kernel& kernel, double c,
                          int num_classes, double tol) {
    if (data.empty()) throw EmptyDataset("svm: no samples");
    std::vector<char> present(static_cast<std::size_t>(num_classes), 0);
    for (const auto& s : data) {
        if (s.label < 0 || s.label >= num_classes)
            throw BadLabel("svm: label " + std::to_string(s.label) +
                           " outside [0," + std::to_string(num_classes) + ")");
        present[s.label] = 1;
    }
    std::vector<int> classes;
    for (int k = 0; k < num_classes; ++k)
        if (present[k]) classes.push_back(k);
    if (classes.size() < 2)
        throw SingleClassData("svm: need at least two classes");

    SvmModel model;
    model.scheme = scheme;
    model.num_classes = num_classes;
    if (scheme == MulticlassScheme::OneVsRest) {
        for (int cls : classes) model.machines.push_back({cls, -1, {}});
    } else {
        for (std::size_t a = 0; a < classes.size(); ++a)
            for (std::size_t b = a + 1; b < classes.size(); ++b)
                model.machines.push_back({classes[a], classes[b], {}});
    }

    parallel_for(model.machines.size(), [&](std::size_t mi) {
        auto& machine = model.machines[mi];
        std::vector<LabeledSample> sub;
        if (machine.negative_class < 0) {
            sub.reserve(data.size());
            for (const auto& s : data)
                sub.push_back({s.x, s.label == machine.positive_class ? 1 : -1});
        } else {
            for (const auto& s : data) {
                if (s.label == machine.positive_class)
                    sub.push_back({s.x, 1});
                else if (s.label == machine.negative_class)
                    sub.push_back({s.x, -1});
            }
        }
        machine.model = train_binary(sub, kernel, c, tol);
    });
    return model;
}

std::pair<int, std::vector<double>> predict(const SvmModel& model,
                                            const std::vector<double>& x) {
    const int n = model.num_classes;
    if (model.scheme == MulticlassScheme::OneVsRest) {
        std::vector<double> scores(static_cast<std::size_t>(n),
                                   std::numeric_limits<double>::lowest());
        for (const auto& machine : model.machines)
            scores[machine.positive_class] = decision(machine.model, x);
        int best = 0;
        for (int j = 1; j < n; ++j)
            if (scores[j] > scores[best]) best = j;
        return {best, std::move(scores)};
    }
    std::vector<double> votes(static_cast<std::size_t>(n), 0.0);
    std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
    for (const auto& machine : model.machines) {
        const double d = decision(machine.model, x);
        votes[d > 0.0 ? machine.positive_class : machine.negative_class] += 1.0;
        sums[machine.positive_class] += d;
        sums[machine.negative_class] -= d;
    }
    int best = 0;
    for (int j = 1; j < n; ++j) {
        if (votes[j] > votes[best] ||
            (votes[j] == votes[best] && sums[j] > sums[best]))
            best = j;
    }
    return {best, std::move(votes)};
}

double select_c(const std::vector<LabeledSample>& train,
                const std::vector<LabeledSample>& selection,
                const std::vector<double>& grid, const Kernel& kernel,
                MulticlassScheme scheme, int num_classes, double tol) {
    if (grid.empty()) throw EmptyGrid("select_c: empty grid");
    if (selection.empty()) throw NoSamples("select_c: empty selection split");
    std::size_t best_correct = 0;
    double best_c = 0.0;
    bool have_best = false;
    for (double c : grid) {
        const SvmModel model = train_multiclass(train, scheme, kernel, c,
                                                num_classes, tol);
        std::size_t correct = 0;
        for (const auto& s : selection)
            if (predict(model, s.x).first == s.label) ++correct;
        if (!have_best || correct > best_correct ||
            (correct == best_correct && c < best_c)) {
            best_correct = correct;
            best_c = c;
            have_best = true;
        }
    }
    return best_c;
}

}  // namespace glyphrec
