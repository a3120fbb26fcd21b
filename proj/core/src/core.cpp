#include "fuzzyseg/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>

#include "fuzzyseg/parallel.hpp"

namespace fuzzyseg {

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw InvalidParameters("matrix shapes differ: " + std::to_string(a.rows) +
                                "x" + std::to_string(a.cols) + " vs " +
                                std::to_string(b.rows) + "x" +
                                std::to_string(b.cols));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    }
    return worst;
}

GrayImage::GrayImage(std::size_t w, std::size_t h, std::vector<double> values)
    : width(w), height(h), intensities(std::move(values)) {
    if (width < 1 || height < 1) {
        throw InvalidParameters("image dimensions must be at least 1x1");
    }
    if (intensities.size() != width * height) {
        throw InvalidParameters("intensity buffer size does not match width*height");
    }
    for (double v : intensities) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidParameters("intensities must lie in [0,1]");
        }
    }
}

Dataset::Dataset(std::size_t p, std::vector<double> flat)
    : dim(p), values(std::move(flat)) {
    if (dim < 1) throw InvalidParameters("feature dimension must be >= 1");
    if (values.empty() || values.size() % dim != 0) {
        throw InvalidParameters("dataset size is not a multiple of the dimension");
    }
}

Dataset to_dataset(const GrayImage& image) {
    return Dataset(1, image.intensities);
}

namespace {

void check_partition_entries(const Matrix& m) {
    for (double v : m.data) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidParameters("partition entries must lie in [0,1]");
        }
    }
}

}  // namespace

MembershipMatrix::MembershipMatrix(Matrix m) : values(std::move(m)) {
    check_partition_entries(values);
    for (std::size_t k = 0; k < values.cols; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < values.rows; ++i) sum += values.at(i, k);
        if (std::abs(sum - 1.0) > 1e-9) {
            throw InvalidParameters("membership column " + std::to_string(k) +
                                    " sums to " + std::to_string(sum));
        }
    }
}

TypicalityMatrix::TypicalityMatrix(Matrix m) : values(std::move(m)) {
    check_partition_entries(values);
    for (std::size_t i = 0; i < values.rows; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < values.cols; ++k) sum += values.at(i, k);
        if (std::abs(sum - 1.0) > 1e-9) {
            throw InvalidParameters("typicality row " + std::to_string(i) +
                                    " sums to " + std::to_string(sum));
        }
    }
}

Centroids::Centroids(std::size_t p, std::vector<double> flat)
    : dim(p), values(std::move(flat)) {
    if (dim < 1) throw InvalidParameters("centroid dimension must be >= 1");
    if (values.empty() || values.size() % dim != 0) {
        throw InvalidParameters("centroid buffer size is not a multiple of the dimension");
    }
}

void SolverParams::validate() const {
    if (c < 2) throw InvalidParameters("cluster count must be >= 2");
    if (!(m > 1.0)) {
        throw InvalidParameters("fuzzifier m must be > 1 (the update exponent "
                                "2/(m-1) is undefined at m = 1)");
    }
    if (!(epsilon > 0.0)) throw InvalidParameters("epsilon must be > 0");
    if (max_iter < 1) throw InvalidParameters("max_iter must be >= 1");
}

MembershipMatrix init_membership(std::size_t c, std::size_t n, std::uint64_t seed) {
    if (c < 2) throw InvalidParameters("cluster count must be >= 2");
    if (n < c) throw InvalidParameters("need at least c data points");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Matrix u(c, n);
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            const double draw = uniform(rng);
            u.at(i, k) = draw;
            sum += draw;
        }
        if (sum == 0.0) {  // unreachable in practice; keeps the column valid
            for (std::size_t i = 0; i < c; ++i) u.at(i, k) = 1.0 / double(c);
            continue;
        }
        for (std::size_t i = 0; i < c; ++i) u.at(i, k) /= sum;
    }
    return MembershipMatrix(std::move(u));
}

bool converged(const MembershipMatrix& u_prev, const MembershipMatrix& u_next,
               double epsilon) {
    return max_abs_diff(u_prev.values, u_next.values) <= epsilon;
}

std::vector<std::size_t> argmax_labels(const Matrix& values) {
    std::vector<std::size_t> labels(values.cols, 0);
    for (std::size_t k = 0; k < values.cols; ++k) {
        std::size_t best = 0;
        double best_value = values.at(0, k);
        for (std::size_t i = 1; i < values.rows; ++i) {
            if (values.at(i, k) > best_value) {
                best_value = values.at(i, k);
                best = i;
            }
        }
        labels[k] = best;
    }
    return labels;
}

unsigned threads_from_env() {
    const char* raw = std::getenv("FUZZYSEG_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    char* end = nullptr;
    const long value = std::strtol(raw, &end, 10);
    if (end == raw || value < 0) return 0;
    return static_cast<unsigned>(value);
}

}  // namespace fuzzyseg
