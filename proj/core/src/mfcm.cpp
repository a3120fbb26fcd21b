#include "fuzzyseg/mfcm.hpp"

#include <utility>
#include <vector>

#include "fuzzyseg/clustering.hpp"
#include "fuzzyseg/parallel.hpp"
#include "mixed_internal.hpp"
#include "solver_internal.hpp"

namespace fuzzyseg {

void MfcmParams::validate() const {
    base.validate();
    nl.validate();
}

WeightTables precompute_weights(const GrayImage& image, const NonLocalConfig& cfg,
                                unsigned threads) {
    cfg.validate();
    const std::size_t n = image.pixel_count();
    WeightTables tables;
    tables.pixels.resize(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            PixelWeightTable& entry = tables.pixels[j];
            entry.local = local_weights(image, j, cfg);
            entry.local_sum = internal::weight_sum(entry.local);
            entry.nonlocal = nonlocal_weights(image, j, cfg);
        }
    });
    return tables;
}

double mixed_distance_cached(const GrayImage& image, const WeightTables& tables,
                             std::size_t j, double center, double lambda) {
    const PixelWeightTable& entry = tables.pixels.at(j);
    return internal::combine_mixed(image, entry.local, entry.local_sum,
                                   entry.nonlocal, j, center, lambda);
}

namespace {

/// d2(i,j) = mixed dissimilarity of pixel j against center i. Pixels are
/// independent, so the fill is data-parallel with deterministic output.
void fill_mixed_d2(const GrayImage& image, const WeightTables& tables,
                   double lambda, const Centroids& v, Matrix& d2,
                   unsigned threads) {
    const std::size_t n = image.pixel_count();
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const PixelWeightTable& entry = tables.pixels[j];
            for (std::size_t i = 0; i < v.count(); ++i) {
                d2.at(i, j) = internal::combine_mixed(
                    image, entry.local, entry.local_sum, entry.nonlocal, j,
                    v.at(i, 0), lambda);
            }
        }
    });
}

}  // namespace

MembershipMatrix mfcm_memberships(const GrayImage& image, const Centroids& v,
                                  const MfcmParams& params,
                                  const WeightTables& tables, unsigned threads) {
    params.validate();
    if (tables.pixels.size() != image.pixel_count()) {
        throw InvalidParameters("weight tables were built for a different image");
    }
    Matrix d2(v.count(), image.pixel_count());
    fill_mixed_d2(image, tables, params.nl.lambda, v, d2, threads);
    return MembershipMatrix(internal::memberships_from_d2(d2, params.base.m));
}

SegmentationResult run_mfcm(const GrayImage& image, const MfcmParams& params,
                            const IterationObserver& observer, unsigned threads) {
    params.validate();
    const WeightTables tables = precompute_weights(image, params.nl, threads);
    const Dataset data = to_dataset(image);
    return internal::run_fuzzy_loop(
        data, params.base,
        [&](const Centroids& v, Matrix& d2) {
            fill_mixed_d2(image, tables, params.nl.lambda, v, d2, threads);
        },
        observer);
}

}  // namespace fuzzyseg
