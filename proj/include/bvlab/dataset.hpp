#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bvlab {

enum class Provenance { synthetic, idx_file };

/// Classification examples stored column-wise: inputs is d_in x count.
struct LabeledDataset {
    Eigen::MatrixXd inputs;
    std::vector<int> labels;
    int classes = 0;
    Provenance provenance = Provenance::synthetic;

    std::size_t size() const { return labels.size(); }
    Eigen::Index input_dim() const { return inputs.rows(); }

    /// Throws std::invalid_argument if lengths differ or a label is out of range.
    void validate() const;

    /// Examples at `indices`, in that order.
    LabeledDataset subset(std::span<const std::size_t> indices) const;
    /// Examples [first, first + count).
    LabeledDataset slice(std::size_t first, std::size_t count) const;
};

/// Gaussian class clusters: class means are margin * u_c for random unit
/// directions u_c, inputs are mean + N(0, I), labels uniform over c classes.
/// margin = 0 makes labels independent of inputs.
LabeledDataset synth_dataset(Eigen::Index d_in, std::size_t n, int classes, double margin,
                             std::uint64_t seed);

/// Replaces each label, independently with probability p, by a uniform draw
/// over all c classes (which may equal the original). `replaced`, if given,
/// receives which positions were redrawn.
std::vector<int> inject_label_noise(std::span<const int> labels, double p, int classes,
                                    std::uint64_t seed, std::vector<bool>* replaced = nullptr);

/// Row-major one-hot encoding, labels.size() x classes.
std::vector<double> one_hot(std::span<const int> labels, int classes);

}  // namespace bvlab
