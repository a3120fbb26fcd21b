#pragma once

// Private helper shared by the distance and mfcm translation units so the
// single-pixel mixed_distance and the table-driven solver path produce
// bit-identical values.

#include "fuzzyseg/core.hpp"
#include "fuzzyseg/distance.hpp"

namespace fuzzyseg::internal {

inline double combine_mixed(const GrayImage& image, const WeightMap& local,
                            double local_sum, const WeightMap& nonlocal,
                            std::size_t j, double center, double lambda) {
    double d_local;
    if (local.empty()) {
        const double diff = image.intensities[j] - center;
        d_local = diff * diff;
    } else {
        double acc = 0.0;
        for (const auto& e : local) {
            const double diff = image.intensities[e.pixel] - center;
            acc += e.weight * (diff * diff);
        }
        d_local = acc / local_sum;
    }

    double d_nonlocal;
    if (nonlocal.empty()) {
        const double diff = image.intensities[j] - center;
        d_nonlocal = diff * diff;
    } else {
        double acc = 0.0;
        for (const auto& e : nonlocal) {
            const double diff = image.intensities[e.pixel] - center;
            acc += e.weight * (diff * diff);
        }
        d_nonlocal = acc;
    }

    return (1.0 - lambda) * d_local + lambda * d_nonlocal;
}

inline double weight_sum(const WeightMap& weights) {
    double sum = 0.0;
    for (const auto& e : weights) sum += e.weight;
    return sum;
}

}  // namespace fuzzyseg::internal
