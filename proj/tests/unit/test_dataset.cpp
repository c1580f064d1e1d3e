#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bvlab/dataset.hpp"

using namespace bvlab;

namespace {

// Least-squares linear probe on one-hot targets; returns test accuracy.
double probe_accuracy(const LabeledDataset& train, const LabeledDataset& test) {
    const Eigen::Index d = train.input_dim();
    Eigen::MatrixXd a(train.size(), d + 1);
    a.leftCols(d) = train.inputs.transpose();
    a.col(d).setOnes();
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(train.size(), train.classes);
    for (std::size_t i = 0; i < train.size(); ++i) y(i, train.labels[i]) = 1.0;
    Eigen::MatrixXd w = (a.transpose() * a).ldlt().solve(a.transpose() * y);

    std::size_t hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        Eigen::VectorXd x(d + 1);
        x << test.inputs.col(i), 1.0;
        Eigen::Index best;
        (w.transpose() * x).maxCoeff(&best);
        hits += best == test.labels[i];
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

}  // namespace

TEST_CASE("synthetic data is reproducible and well formed") {
    auto a = synth_dataset(5, 200, 3, 2.0, 4);
    auto b = synth_dataset(5, 200, 3, 2.0, 4);
    CHECK(a.inputs == b.inputs);
    CHECK(a.labels == b.labels);
    CHECK(a.provenance == Provenance::synthetic);
    CHECK_NOTHROW(a.validate());
    CHECK(a.input_dim() == 5);
    CHECK(a.size() == 200);
    auto c = synth_dataset(5, 200, 3, 2.0, 5);
    CHECK_FALSE(a.inputs == c.inputs);
    CHECK_THROWS_AS(synth_dataset(5, 10, 1, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(synth_dataset(0, 10, 2, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(synth_dataset(5, 10, 2, -1.0, 0), std::invalid_argument);
}

TEST_CASE("margin controls separability") {
    auto flat = synth_dataset(10, 6000, 4, 0.0, 1);
    const double chance = probe_accuracy(flat.slice(0, 5000), flat.slice(5000, 1000));
    CHECK(std::abs(chance - 0.25) <= 0.05);

    auto wide = synth_dataset(10, 6000, 4, 12.0, 1);
    CHECK(probe_accuracy(wide.slice(0, 5000), wide.slice(5000, 1000)) > 0.95);
}

TEST_CASE("subset and slice") {
    auto data = synth_dataset(3, 10, 2, 1.0, 2);
    std::vector<std::size_t> idx{7, 2};
    auto sub = data.subset(idx);
    CHECK(sub.labels == std::vector<int>{data.labels[7], data.labels[2]});
    CHECK(sub.inputs.col(0) == data.inputs.col(7));
    CHECK(data.slice(8, 2).labels.size() == 2);
    CHECK_THROWS_AS(data.slice(9, 2), std::out_of_range);
    std::vector<std::size_t> bad{10};
    CHECK_THROWS_AS(data.subset(bad), std::out_of_range);

    data.labels[0] = 5;
    CHECK_THROWS_AS(data.validate(), std::invalid_argument);
}

TEST_CASE("label noise") {
    std::vector<int> labels(10000);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 10);

    CHECK(inject_label_noise(labels, 0.0, 10, 1) == labels);

    auto all = inject_label_noise(labels, 1.0, 10, 2);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) changed += all[i] != labels[i];
    // Each redraw keeps the old class with probability 1/10.
    const double sd_all = std::sqrt(10000 * 0.9 * 0.1);
    CHECK(std::abs(static_cast<double>(changed) - 9000.0) <= 3.0 * sd_all);

    std::vector<bool> replaced;
    auto some = inject_label_noise(labels, 0.1, 10, 3, &replaced);
    std::size_t count = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        count += replaced[i];
        if (!replaced[i]) CHECK(some[i] == labels[i]);
        CHECK(some[i] >= 0);
        CHECK(some[i] < 10);
    }
    const double sd = std::sqrt(10000 * 0.1 * 0.9);
    CHECK(std::abs(static_cast<double>(count) - 1000.0) <= 3.0 * sd);

    CHECK(inject_label_noise(labels, 0.1, 10, 3) == some);
    CHECK_THROWS_AS(inject_label_noise(labels, 1.5, 10, 0), std::invalid_argument);
}

TEST_CASE("one-hot encoding") {
    std::vector<int> labels{2, 0};
    CHECK(one_hot(labels, 3) == std::vector<double>{0, 0, 1, 1, 0, 0});
    std::vector<int> bad{3};
    CHECK_THROWS_AS(one_hot(bad, 3), std::invalid_argument);
}
