#include "bvlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bvlab {

namespace {

void check_shape(const EnsembleShape& shape) {
    if (shape.test_count == 0 || shape.repeats == 0 || shape.parts == 0 || shape.dim == 0)
        throw std::invalid_argument("ensemble shape has a zero extent");
}

}  // namespace

PredictionMatrix::PredictionMatrix(EnsembleShape shape) : shape_(shape) {
    check_shape(shape_);
    values_.assign(shape_.size(), 0.0);
}

PredictionMatrix::PredictionMatrix(EnsembleShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    check_shape(shape_);
    if (values_.size() != shape_.size())
        throw std::invalid_argument("PredictionMatrix: expected " + std::to_string(shape_.size()) +
                                    " values, got " + std::to_string(values_.size()));
    validate();
}

std::size_t PredictionMatrix::offset(std::size_t test, std::size_t repeat, std::size_t part) const {
    return ((test * shape_.repeats + repeat) * shape_.parts + part) * shape_.dim;
}

std::span<double> PredictionMatrix::output(std::size_t test, std::size_t repeat, std::size_t part) {
    return {values_.data() + offset(test, repeat, part), shape_.dim};
}

std::span<const double> PredictionMatrix::output(std::size_t test, std::size_t repeat,
                                                 std::size_t part) const {
    return {values_.data() + offset(test, repeat, part), shape_.dim};
}

std::span<const double> PredictionMatrix::point(std::size_t test) const {
    return {values_.data() + offset(test, 0, 0), shape_.model_count() * shape_.dim};
}

void PredictionMatrix::validate() const {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("PredictionMatrix: non-finite entry at flat index " +
                                        std::to_string(i));
}

void clamp_to_simplex(std::span<double> probs, double floor) {
    double total = 0.0;
    for (double& p : probs) {
        if (std::isnan(p)) throw std::invalid_argument("probability vector contains NaN");
        p = std::clamp(p, floor, 1.0);
        total += p;
    }
    for (double& p : probs) p /= total;
}

ProbabilityEnsemble::ProbabilityEnsemble(EnsembleShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    check_shape(shape_);
    if (values_.size() != shape_.size())
        throw std::invalid_argument("ProbabilityEnsemble: expected " +
                                    std::to_string(shape_.size()) + " values, got " +
                                    std::to_string(values_.size()));
    for (std::size_t v = 0; v < values_.size(); v += shape_.dim)
        clamp_to_simplex(std::span<double>(values_.data() + v, shape_.dim));
}

ProbabilityEnsemble::ProbabilityEnsemble(const PredictionMatrix& raw)
    : ProbabilityEnsemble(raw.shape(), std::vector<double>(raw.values().begin(), raw.values().end())) {}

std::span<const double> ProbabilityEnsemble::output(std::size_t test, std::size_t repeat,
                                                    std::size_t part) const {
    const std::size_t off = ((test * shape_.repeats + repeat) * shape_.parts + part) * shape_.dim;
    return {values_.data() + off, shape_.dim};
}

std::span<const double> ProbabilityEnsemble::point(std::size_t test) const {
    const std::size_t width = shape_.model_count() * shape_.dim;
    return {values_.data() + test * width, width};
}

}  // namespace bvlab
