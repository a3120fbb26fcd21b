#pragma once

#include <vector>

#include "fuzzyseg/core.hpp"
#include "fuzzyseg/distance.hpp"

namespace fuzzyseg {

struct MfcmParams {
    SolverParams base;
    NonLocalConfig nl;

    void validate() const;
};

/// Per-pixel weight maps. Local weights are stored raw together with their
/// sum; non-local weights are stored normalized, exactly as the distance
/// module returns them.
struct PixelWeightTable {
    WeightMap local;
    double local_sum = 0.0;
    WeightMap nonlocal;
};

/// Weight tables for a whole image. Dense storage: about (2r_s+1)^2 entries
/// per pixel, i.e. ~121 entries/pixel at the default r_s=5 — roughly 450 MB
/// at the 512x512 ceiling, a few MB at benchmark sizes.
struct WeightTables {
    std::vector<PixelWeightTable> pixels;
};

/// Computes every pixel's local and non-local weight map once; both depend
/// only on the image, not on the cluster centers.
WeightTables precompute_weights(const GrayImage& image, const NonLocalConfig& cfg,
                                unsigned threads = 0);

/// mixed_distance evaluated from precomputed tables; bit-identical to the
/// single-pixel mixed_distance call.
double mixed_distance_cached(const GrayImage& image, const WeightTables& tables,
                             std::size_t j, double center, double lambda);

/// Standard FCM membership update with the mixed local/non-local dissimilarity
/// substituted for the pointwise squared distance.
MembershipMatrix mfcm_memberships(const GrayImage& image, const Centroids& v,
                                  const MfcmParams& params,
                                  const WeightTables& tables,
                                  unsigned threads = 0);

/// Modified FCM: centers update from raw intensities exactly as in FCM, the
/// membership update uses the mixed dissimilarity. The recorded trace is the
/// surrogate objective sum_k sum_i mu^m d_mixed and is not guaranteed to be
/// monotone; convergence is the membership-change test.
SegmentationResult run_mfcm(const GrayImage& image, const MfcmParams& params,
                            const IterationObserver& observer = {},
                            unsigned threads = 0);

}  // namespace fuzzyseg
