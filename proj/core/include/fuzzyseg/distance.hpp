#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fuzzyseg/core.hpp"

namespace fuzzyseg {

/// Second-order statistics of a dataset. `inverse_covariance` is the weight
/// matrix A of the induced A-norm; the covariance itself is assembled from
/// correlations and standard deviations (cov_ij = rho_ij * sigma_i * sigma_j)
/// with the unbiased n-1 divisor.
struct CovarianceModel {
    std::vector<double> means;
    Matrix inverse_covariance;
    std::vector<double> variances;
    Matrix correlations;

    std::size_t dim() const { return means.size(); }

    static CovarianceModel identity(std::size_t p);
};

/// Sample means/variances/correlations plus the inverted covariance.
/// Throws SingularCovariance when the covariance cannot be inverted
/// (callers typically fall back to the Euclidean norm).
CovarianceModel fit_covariance(const Dataset& data);

/// Plain squared Euclidean distance.
double euclidean_sq(std::span<const double> x, std::span<const double> y);

/// Quadratic form sum_ij A_ij (x_i - y_i)(x_j - y_j) with A the fitted
/// inverse covariance.
double mahalanobis_sq(std::span<const double> x, std::span<const double> y,
                      const CovarianceModel& model);

/// Squared point-to-point distance under a selected norm. Bundles the fitted
/// covariance model so solvers carry one callable instead of (enum, model).
class PointDistance {
public:
    static PointDistance euclidean();
    static PointDistance mahalanobis(CovarianceModel model);

    /// Builds the metric for the given params; a singular covariance falls
    /// back to Euclidean as documented on fit_covariance.
    static PointDistance for_dataset(const Dataset& data, Norm norm);

    double operator()(std::span<const double> x, std::span<const double> y) const {
        return norm_ == Norm::Euclidean ? euclidean_sq(x, y)
                                        : mahalanobis_sq(x, y, model_);
    }

    Norm norm() const { return norm_; }

private:
    PointDistance(Norm norm, CovarianceModel model)
        : norm_(norm), model_(std::move(model)) {}

    Norm norm_;
    CovarianceModel model_;
};

/// Free parameters of the modified (local + non-local) dissimilarity.
struct NonLocalConfig {
    int neighborhood_radius = 2;  // r_l: N_j is the (2r_l+1)^2 window, center excluded
    int search_radius = 5;        // r_s: truncation window for the non-local sum
    int patch_radius = 2;         // r_p: patches are (2r_p+1)^2
    double bandwidth = 0.1;       // h: non-local filtering bandwidth, on [0,1] intensities
    double lambda = 0.5;          // tradeoff between local and non-local terms

    void validate() const;
};

struct WeightEntry {
    std::uint32_t pixel = 0;
    double weight = 0.0;
};

/// Weights in row-major scan order of the window; deterministic.
using WeightMap = std::vector<WeightEntry>;

/// Spatial Gaussian weights exp(-s^2 / (2 r_l^2)) for every in-bounds pixel
/// of N_j (center excluded), s the Euclidean pixel distance. The kernel is
/// deliberately intensity-blind, so the local term acts as a
/// neighborhood-smoothed distance. Weights are raw (unnormalized).
WeightMap local_weights(const GrayImage& image, std::size_t j,
                        const NonLocalConfig& cfg);

/// Classical non-local-means patch weights over the (2r_s+1)^2 search window
/// clipped to the image, center excluded: raw weight exp(-||P(k)-P(j)||^2 / h^2)
/// with (2r_p+1)^2 patches, mirror-padded at the borders, then normalized to
/// sum 1. Raw weights are computed relative to the best-matching patch so the
/// normalization never divides by an underflowed sum.
WeightMap nonlocal_weights(const GrayImage& image, std::size_t j,
                           const NonLocalConfig& cfg);

/// (1-lambda) * d_l^2 + lambda * d_nl^2 for pixel j against a scalar center:
/// d_l^2 is the omega_l-weighted average of (x_k - center)^2 over N_j,
/// d_nl^2 the omega_nl-weighted average over the search window. Degenerate
/// windows (1x1 image) fall back to the pointwise squared distance.
double mixed_distance(const GrayImage& image, std::size_t j, double center,
                      const NonLocalConfig& cfg);

}  // namespace fuzzyseg
