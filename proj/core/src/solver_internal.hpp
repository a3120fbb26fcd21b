#pragma once

// Shared alternating-update kernels. run_fcm and run_mfcm drive the same loop
// with different distance fields, which keeps their trajectories structurally
// identical whenever the distances agree.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fuzzyseg/clustering.hpp"
#include "fuzzyseg/core.hpp"

namespace fuzzyseg::internal {

/// Fills d2(i,k) with the squared distance from point k to center i.
inline void fill_pointwise_d2(const Dataset& data, const Centroids& v,
                              const PointDistance& dist, Matrix& d2) {
    for (std::size_t i = 0; i < v.count(); ++i) {
        const auto center = v.center(i);
        for (std::size_t k = 0; k < data.size(); ++k) {
            d2.at(i, k) = dist(data.point(k), center);
        }
    }
}

/// One FCM/FPCM membership column from a distance column. Clusters at zero
/// distance (or whose power underflows to zero) split the membership equally.
inline void membership_column_from_d2(const Matrix& d2, std::size_t k, double m,
                                      Matrix& u, std::vector<double>& q) {
    const std::size_t c = d2.rows;
    const double expo = 1.0 / (m - 1.0);
    std::size_t zero_count = 0;
    for (std::size_t i = 0; i < c; ++i) {
        const double p = std::pow(d2.at(i, k), expo);
        q[i] = p;
        if (d2.at(i, k) == 0.0 || p == 0.0) ++zero_count;
    }
    if (zero_count > 0) {
        const double share = 1.0 / double(zero_count);
        for (std::size_t i = 0; i < c; ++i) {
            u.at(i, k) = (d2.at(i, k) == 0.0 || q[i] == 0.0) ? share : 0.0;
        }
        return;
    }
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < c; ++i) inv_sum += 1.0 / q[i];
    for (std::size_t i = 0; i < c; ++i) {
        // the true value is <= 1; rounding of q*inv_sum can land a hair below 1
        u.at(i, k) = std::min(1.0, 1.0 / (q[i] * inv_sum));
    }
}

inline Matrix memberships_from_d2(const Matrix& d2, double m) {
    Matrix u(d2.rows, d2.cols);
    std::vector<double> q(d2.rows);
    for (std::size_t k = 0; k < d2.cols; ++k) {
        membership_column_from_d2(d2, k, m, u, q);
    }
    return u;
}

/// sum_i sum_k u_ik^m d2_ik, accumulated in fixed row-major order.
inline double objective_from_d2(const Matrix& u, const Matrix& d2, double m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < u.rows; ++i) {
        for (std::size_t k = 0; k < u.cols; ++k) {
            sum += std::pow(u.at(i, k), m) * d2.at(i, k);
        }
    }
    return sum;
}

using FillDistances = std::function<void(const Centroids&, Matrix&)>;

/// The conventional FCM loop: random partition, then alternate centers and
/// memberships until the membership change drops to epsilon or max_iter.
SegmentationResult run_fuzzy_loop(const Dataset& data, const SolverParams& params,
                                  const FillDistances& fill,
                                  const IterationObserver& observer);

}  // namespace fuzzyseg::internal
