#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bvlab {

/// Shape of an ensemble of outputs: test points x repeats x parts x dim.
struct EnsembleShape {
    std::size_t test_count = 0;
    std::size_t repeats = 0;  // k
    std::size_t parts = 0;    // N
    std::size_t dim = 0;      // c

    std::size_t model_count() const { return repeats * parts; }
    std::size_t size() const { return test_count * repeats * parts * dim; }
    bool operator==(const EnsembleShape&) const = default;
};

/// Real-valued outputs of k*N trained models at every test point.
class PredictionMatrix {
public:
    explicit PredictionMatrix(EnsembleShape shape);
    /// Takes ownership of `values` laid out as [test][repeat][part][dim].
    /// Throws if the size is wrong or any entry is non-finite.
    PredictionMatrix(EnsembleShape shape, std::vector<double> values);

    const EnsembleShape& shape() const { return shape_; }

    std::span<double> output(std::size_t test, std::size_t repeat, std::size_t part);
    std::span<const double> output(std::size_t test, std::size_t repeat, std::size_t part) const;

    /// All k*N model outputs at one test point, model-major.
    std::span<const double> point(std::size_t test) const;

    std::span<const double> values() const { return values_; }

    /// Throws std::invalid_argument on any non-finite entry.
    void validate() const;

private:
    std::size_t offset(std::size_t test, std::size_t repeat, std::size_t part) const;

    EnsembleShape shape_;
    std::vector<double> values_;
};

/// Outputs that are points of the probability simplex.
///
/// Construction clamps every entry to [kProbabilityFloor, 1] and renormalizes,
/// so logs stay finite when a softmax underflows.
class ProbabilityEnsemble {
public:
    static constexpr double kProbabilityFloor = 1e-12;

    ProbabilityEnsemble(EnsembleShape shape, std::vector<double> values);
    explicit ProbabilityEnsemble(const PredictionMatrix& raw);

    const EnsembleShape& shape() const { return shape_; }
    std::span<const double> output(std::size_t test, std::size_t repeat, std::size_t part) const;
    std::span<const double> point(std::size_t test) const;
    std::span<const double> values() const { return values_; }

private:
    EnsembleShape shape_;
    std::vector<double> values_;
};

/// Clamps to [floor, 1] and rescales to unit sum, in place.
void clamp_to_simplex(std::span<double> probs, double floor = ProbabilityEnsemble::kProbabilityFloor);

}  // namespace bvlab
