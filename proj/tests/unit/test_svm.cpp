#include <doctest.h>

#include <cmath>
#include <vector>

#include "glyphrec/errors.hpp"
#include "glyphrec/svm.hpp"

using namespace glyphrec;

namespace {

// Three tight clusters around fixed anchors, eight points each.
std::vector<LabeledSample> three_clusters() {
    const double anchors[3][2] = {{0.1, 0.1}, {0.9, 0.2}, {0.5, 0.9}};
    std::vector<LabeledSample> data;
    for (int cls = 0; cls < 3; ++cls) {
        for (int i = 0; i < 8; ++i) {
            const double dx = 0.02 * (i % 3) - 0.02;
            const double dy = 0.02 * (i / 3) - 0.02;
            data.push_back({{anchors[cls][0] + dx, anchors[cls][1] + dy}, cls});
        }
    }
    return data;
}

std::vector<LabeledSample> xor_points() {
    return {{{0.0, 0.0}, 1}, {{1.0, 1.0}, 1}, {{0.0, 1.0}, -1}, {{1.0, 0.0}, -1}};
}

}  // namespace

TEST_CASE("kernel evaluations match closed forms") {
    const std::vector<double> x = {1.0, 2.0, -1.0};
    const std::vector<double> y = {0.5, -1.0, 2.0};
    const double dot = 0.5 - 2.0 - 2.0;

    CHECK(kernel_eval(Kernel{Kernel::Tag::Linear, 1.0, 2}, x, y) == dot);

    const double dist2 = 0.25 + 9.0 + 9.0;
    const Kernel rbf{Kernel::Tag::Rbf, 1.5, 2};
    CHECK(kernel_eval(rbf, x, y) ==
          doctest::Approx(std::exp(-dist2 / (2.0 * 1.5 * 1.5))));
    CHECK(kernel_eval(rbf, x, x) == doctest::Approx(1.0));

    const Kernel poly{Kernel::Tag::Poly, 1.0, 3};
    CHECK(kernel_eval(poly, x, y) ==
          doctest::Approx((dot + 1.0) * (dot + 1.0) * (dot + 1.0)));

    CHECK(kernel_eval(rbf, y, x) == kernel_eval(rbf, x, y));
    CHECK(default_sigma(368) == doctest::Approx(std::sqrt(368.0) / 2.0));
}

TEST_CASE("kernel names round trip") {
    for (auto tag : {Kernel::Tag::Linear, Kernel::Tag::Rbf, Kernel::Tag::Poly})
        CHECK(kernel_tag_from_string(to_string(tag)) == tag);
    CHECK_THROWS_AS(kernel_tag_from_string("sigmoid"), InvalidArgument);
}

TEST_CASE("two point problem recovers the analytic maximum margin solution") {
    const std::vector<LabeledSample> data = {{{-1.0}, -1}, {{1.0}, 1}};
    std::vector<double> trace, alphas;
    const SvmBinaryModel m = train_binary(data, Kernel{Kernel::Tag::Linear, 1.0, 2},
                                          10.0, 1e-3, &trace, &alphas);

    // The dual optimum is alpha = 0.5 on both points, bias 0, f(x) = x.
    REQUIRE(alphas.size() == 2);
    CHECK(alphas[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(alphas[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(m.bias == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(decision(m, {-1.0}) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(decision(m, {0.0}) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(decision(m, {1.0}) == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(kkt_violation_count(m, data, alphas, 1e-3) == 0);
    double sum = 0.0;
    for (double c : m.coefficients) sum += c;
    CHECK(std::abs(sum) < 1e-8);

    REQUIRE_FALSE(trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] >= trace[i - 1] - 1e-9);
}

TEST_CASE("rbf kernel separates xor") {
    const auto data = xor_points();
    std::vector<double> alphas;
    const SvmBinaryModel m = train_binary(data, Kernel{Kernel::Tag::Rbf, 0.5, 2},
                                          100.0, 1e-3, nullptr, &alphas);
    for (const auto& s : data) {
        const double f = decision(m, s.x);
        CHECK(f * s.label > 0.0);
    }
    CHECK(kkt_violation_count(m, data, alphas, 1e-3) == 0);
    double sum = 0.0;
    for (double c : m.coefficients) sum += c;
    CHECK(std::abs(sum) < 1e-8);
}

TEST_CASE("binary training validates its inputs") {
    const Kernel lin{Kernel::Tag::Linear, 1.0, 2};
    const std::vector<LabeledSample> ok = {{{0.0}, -1}, {{1.0}, 1}};
    CHECK_THROWS_AS(train_binary(ok, lin, 0.0), NonPositiveC);
    CHECK_THROWS_AS(train_binary({}, lin, 1.0), EmptyDataset);

    const std::vector<LabeledSample> bad_label = {{{0.0}, 0}, {{1.0}, 1}};
    CHECK_THROWS_AS(train_binary(bad_label, lin, 1.0), BadLabel);

    const std::vector<LabeledSample> one_class = {{{0.0}, 1}, {{1.0}, 1}};
    CHECK_THROWS_AS(train_binary(one_class, lin, 1.0), SingleClassData);

    const std::vector<LabeledSample> ragged = {{{0.0}, -1}, {{1.0, 2.0}, 1}};
    CHECK_THROWS_AS(train_binary(ragged, lin, 1.0), DimensionMismatch);
}

TEST_CASE("one-vs-rest covers present classes and classifies the clusters") {
    const auto data = three_clusters();
    const SvmModel model = train_multiclass(data, MulticlassScheme::OneVsRest,
                                            Kernel{Kernel::Tag::Linear, 1.0, 2},
                                            10.0, 49);
    REQUIRE(model.machines.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(model.machines[i].positive_class == static_cast<int>(i));
        CHECK(model.machines[i].negative_class == -1);
    }
    for (const auto& s : data) {
        const auto [label, scores] = predict(model, s.x);
        CHECK(label == s.label);
        CHECK(scores.size() == 49);
    }
}

TEST_CASE("one-vs-one builds ascending pairs and votes correctly") {
    const auto data = three_clusters();
    const SvmModel model = train_multiclass(data, MulticlassScheme::OneVsOne,
                                            Kernel{Kernel::Tag::Rbf, 0.3, 2},
                                            10.0, 49);
    REQUIRE(model.machines.size() == 3);
    CHECK(model.machines[0].positive_class == 0);
    CHECK(model.machines[0].negative_class == 1);
    CHECK(model.machines[1].positive_class == 0);
    CHECK(model.machines[1].negative_class == 2);
    CHECK(model.machines[2].positive_class == 1);
    CHECK(model.machines[2].negative_class == 2);
    for (const auto& s : data) CHECK(predict(model, s.x).first == s.label);
}

TEST_CASE("absent classes never win") {
    std::vector<LabeledSample> data;
    for (const auto& s : three_clusters())
        if (s.label != 1) data.push_back(s);
    const SvmModel model = train_multiclass(data, MulticlassScheme::OneVsRest,
                                            Kernel{Kernel::Tag::Linear, 1.0, 2},
                                            10.0, 49);
    REQUIRE(model.machines.size() == 2);
    CHECK(model.machines[0].positive_class == 0);
    CHECK(model.machines[1].positive_class == 2);
    for (const auto& s : data) CHECK(predict(model, s.x).first == s.label);
}

TEST_CASE("multiclass training rejects single-class data") {
    std::vector<LabeledSample> data;
    for (int i = 0; i < 5; ++i) data.push_back({{0.1 * i}, 3});
    CHECK_THROWS_AS(train_multiclass(data, MulticlassScheme::OneVsRest,
                                     Kernel{Kernel::Tag::Linear, 1.0, 2}, 1.0, 49),
                    SingleClassData);
}

TEST_CASE("c selection prefers the smallest tied value") {
    const auto data = three_clusters();
    // Every c separates these clusters perfectly, so the tie-break decides.
    const double c = select_c(data, data, {4.0, 0.5, 2.0},
                              Kernel{Kernel::Tag::Linear, 1.0, 2},
                              MulticlassScheme::OneVsRest, 49);
    CHECK(c == 0.5);

    CHECK_THROWS_AS(select_c(data, data, {}, Kernel{Kernel::Tag::Linear, 1.0, 2},
                             MulticlassScheme::OneVsRest, 49),
                    EmptyGrid);
    CHECK_THROWS_AS(select_c(data, {}, {1.0}, Kernel{Kernel::Tag::Linear, 1.0, 2},
                             MulticlassScheme::OneVsRest, 49),
                    NoSamples);
}
