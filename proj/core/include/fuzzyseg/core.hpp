#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fuzzyseg/errors.hpp"

namespace fuzzyseg {

/// Dense row-major matrix of doubles. Partition matrices are stored with one
/// row per cluster and one column per data point.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

/// Largest absolute entry-wise difference between two equally shaped matrices.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// 2-D grayscale image with intensities normalized to [0,1].
/// Pixel k corresponds to (row, col) = (k / width, k % width).
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> intensities;

    GrayImage(std::size_t w, std::size_t h, std::vector<double> values);

    std::size_t pixel_count() const { return width * height; }
    double at(std::size_t x, std::size_t y) const { return intensities[y * width + x]; }
};

/// Flat collection of N feature vectors of dimension p. Images enter the
/// solvers as 1-D datasets of raw intensities.
struct Dataset {
    std::size_t dim = 1;
    std::vector<double> values;  // n * dim, point-major

    Dataset(std::size_t p, std::vector<double> flat);

    std::size_t size() const { return values.size() / dim; }
    std::span<const double> point(std::size_t k) const {
        return {values.data() + k * dim, dim};
    }
};

Dataset to_dataset(const GrayImage& image);

/// Fuzzy c-partition: c x N, entries in [0,1], every column sums to 1.
struct MembershipMatrix {
    Matrix values;

    MembershipMatrix() = default;
    explicit MembershipMatrix(Matrix m);  // validates the partition constraint

    std::size_t clusters() const { return values.rows; }
    std::size_t points() const { return values.cols; }
    double at(std::size_t i, std::size_t k) const { return values.at(i, k); }
};

/// Possibilistic matrix: c x N, entries in [0,1], every row sums to 1.
struct TypicalityMatrix {
    Matrix values;

    TypicalityMatrix() = default;
    explicit TypicalityMatrix(Matrix m);  // validates the row constraint

    std::size_t clusters() const { return values.rows; }
    std::size_t points() const { return values.cols; }
    double at(std::size_t i, std::size_t k) const { return values.at(i, k); }
};

/// c cluster prototypes in feature space.
struct Centroids {
    std::size_t dim = 1;
    std::vector<double> values;  // count * dim

    Centroids() = default;
    Centroids(std::size_t p, std::vector<double> flat);

    std::size_t count() const { return values.size() / dim; }
    std::span<const double> center(std::size_t i) const {
        return {values.data() + i * dim, dim};
    }
    double& at(std::size_t i, std::size_t d) { return values[i * dim + d]; }
    double at(std::size_t i, std::size_t d) const { return values[i * dim + d]; }
};

enum class Norm { Euclidean, Mahalanobis };

/// Shared knobs of all solvers.
struct SolverParams {
    std::size_t c = 2;          // cluster count, >= 2
    double m = 2.0;             // fuzzifier, > 1
    double epsilon = 1e-5;      // convergence threshold on max membership change
    std::size_t max_iter = 100;
    std::uint64_t seed = 1;
    Norm norm = Norm::Euclidean;

    void validate() const;
};

/// Snapshot of a solver iteration handed to observers. References are only
/// valid during the callback.
struct IterationState {
    std::size_t iteration = 0;  // 1-based
    const Matrix& membership;
    const Matrix* typicality;  // non-null only for FPCM
    const Centroids& centroids;
    double objective = 0.0;
    double max_delta = 0.0;
};

/// Optional per-iteration hook; must not mutate solver state. Used by the
/// CLI --verbose log and by constraint tests.
using IterationObserver = std::function<void(const IterationState&)>;

/// Universal solver output for FCM/MFCM/FPCM.
struct SegmentationResult {
    MembershipMatrix membership;
    std::optional<TypicalityMatrix> typicality;
    Centroids centroids;
    std::vector<std::size_t> labels;  // argmax per column, ties -> lowest index
    std::size_t iterations = 0;
    std::vector<double> objective_trace;  // one entry per iteration
    bool converged = false;
};

/// Random fuzzy partition: each column is c independent uniform draws
/// normalized to sum 1. Deterministic for a fixed seed.
MembershipMatrix init_membership(std::size_t c, std::size_t n, std::uint64_t seed);

/// True iff max |u_next - u_prev| <= epsilon (inclusive at the boundary).
bool converged(const MembershipMatrix& u_prev, const MembershipMatrix& u_next,
               double epsilon);

/// argmax per column, ties resolved to the lowest cluster index.
std::vector<std::size_t> argmax_labels(const Matrix& values);

}  // namespace fuzzyseg
