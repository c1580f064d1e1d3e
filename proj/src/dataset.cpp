#include "bvlab/dataset.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "bvlab/rng.hpp"

namespace bvlab {

void LabeledDataset::validate() const {
    if (static_cast<std::size_t>(inputs.cols()) != labels.size())
        throw std::invalid_argument("LabeledDataset: " + std::to_string(inputs.cols()) + " inputs but " +
                                    std::to_string(labels.size()) + " labels");
    for (int y : labels)
        if (y < 0 || y >= classes)
            throw std::invalid_argument("LabeledDataset: label " + std::to_string(y) + " outside [0, " +
                                        std::to_string(classes) + ")");
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
    LabeledDataset out;
    out.classes = classes;
    out.provenance = provenance;
    out.inputs.resize(inputs.rows(), static_cast<Eigen::Index>(indices.size()));
    out.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= size()) throw std::out_of_range("LabeledDataset::subset index");
        out.inputs.col(static_cast<Eigen::Index>(i)) = inputs.col(static_cast<Eigen::Index>(indices[i]));
        out.labels[i] = labels[indices[i]];
    }
    return out;
}

LabeledDataset LabeledDataset::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw std::out_of_range("LabeledDataset::slice");
    LabeledDataset out;
    out.classes = classes;
    out.provenance = provenance;
    out.inputs = inputs.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
    out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(first),
                      labels.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

LabeledDataset synth_dataset(Eigen::Index d_in, std::size_t n, int classes, double margin,
                             std::uint64_t seed) {
    if (d_in < 1) throw std::invalid_argument("synth_dataset: d_in must be >= 1");
    if (classes < 2) throw std::invalid_argument("synth_dataset: need at least 2 classes");
    if (!(margin >= 0.0)) throw std::invalid_argument("synth_dataset: margin must be >= 0");

    std::normal_distribution<double> normal(0.0, 1.0);
    Rng center_rng(derive_seed(seed, 0));
    Eigen::MatrixXd centers(d_in, classes);
    for (int c = 0; c < classes; ++c) {
        for (Eigen::Index i = 0; i < d_in; ++i) centers(i, c) = normal(center_rng);
        centers.col(c) *= margin / centers.col(c).norm();
    }

    LabeledDataset out;
    out.classes = classes;
    out.provenance = Provenance::synthetic;
    out.inputs.resize(d_in, static_cast<Eigen::Index>(n));
    out.labels.resize(n);
    Rng rng(derive_seed(seed, 1));
    for (std::size_t e = 0; e < n; ++e) {
        const int y = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(classes)));
        out.labels[e] = y;
        for (Eigen::Index i = 0; i < d_in; ++i)
            out.inputs(i, static_cast<Eigen::Index>(e)) = centers(i, y) + normal(rng);
    }
    return out;
}

std::vector<int> inject_label_noise(std::span<const int> labels, double p, int classes,
                                    std::uint64_t seed, std::vector<bool>* replaced) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("inject_label_noise: p must lie in [0, 1]");
    if (classes < 1) throw std::invalid_argument("inject_label_noise: classes must be >= 1");
    std::vector<int> out(labels.begin(), labels.end());
    if (replaced) replaced->assign(out.size(), false);
    Rng rng(seed);
    for (std::size_t i = 0; i < out.size(); ++i) {
        // One coin and one class draw per label keeps the stream aligned for any p.
        const double coin = uniform01(rng);
        const int draw = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(classes)));
        if (coin < p) {
            out[i] = draw;
            if (replaced) (*replaced)[i] = true;
        }
    }
    return out;
}

std::vector<double> one_hot(std::span<const int> labels, int classes) {
    std::vector<double> out(labels.size() * static_cast<std::size_t>(classes), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= classes) throw std::invalid_argument("one_hot: label out of range");
        out[i * static_cast<std::size_t>(classes) + static_cast<std::size_t>(labels[i])] = 1.0;
    }
    return out;
}

}  // namespace bvlab
