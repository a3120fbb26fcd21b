#include "fuzzyseg/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mixed_internal.hpp"

namespace fuzzyseg {

namespace {

void check_dims(std::size_t a, std::size_t b) {
    if (a != b) {
        throw InvalidParameters("vector dimensions differ: " + std::to_string(a) +
                                " vs " + std::to_string(b));
    }
}

/// In-place inverse by Gauss-Jordan with partial pivoting. Throws
/// SingularCovariance when a pivot falls below a relative threshold. The
/// absolute floor catches covariances that are only nonzero through rounding
/// noise (e.g. identical data points).
Matrix invert(const Matrix& a) {
    const std::size_t p = a.rows;
    double scale = 0.0;
    for (double v : a.data) scale = std::max(scale, std::abs(v));
    if (scale <= 1e-24) throw SingularCovariance("covariance matrix is zero");
    const double tiny = 1e-12 * scale;

    Matrix work = a;
    Matrix inv(p, p);
    for (std::size_t i = 0; i < p; ++i) inv.at(i, i) = 1.0;

    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (std::abs(work.at(r, col)) > std::abs(work.at(pivot, col))) pivot = r;
        }
        if (std::abs(work.at(pivot, col)) <= tiny) {
            throw SingularCovariance("covariance matrix is singular");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < p; ++c) {
                std::swap(work.at(pivot, c), work.at(col, c));
                std::swap(inv.at(pivot, c), inv.at(col, c));
            }
        }
        const double d = work.at(col, col);
        for (std::size_t c = 0; c < p; ++c) {
            work.at(col, c) /= d;
            inv.at(col, c) /= d;
        }
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = work.at(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < p; ++c) {
                work.at(r, c) -= f * work.at(col, c);
                inv.at(r, c) -= f * inv.at(col, c);
            }
        }
    }
    return inv;
}

}  // namespace

CovarianceModel CovarianceModel::identity(std::size_t p) {
    CovarianceModel model;
    model.means.assign(p, 0.0);
    model.variances.assign(p, 1.0);
    model.inverse_covariance = Matrix(p, p);
    model.correlations = Matrix(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        model.inverse_covariance.at(i, i) = 1.0;
        model.correlations.at(i, i) = 1.0;
    }
    return model;
}

CovarianceModel fit_covariance(const Dataset& data) {
    const std::size_t n = data.size();
    const std::size_t p = data.dim;
    if (n < 2) throw InvalidParameters("covariance needs at least 2 points");

    CovarianceModel model;
    model.means.assign(p, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto x = data.point(k);
        for (std::size_t d = 0; d < p; ++d) model.means[d] += x[d];
    }
    for (std::size_t d = 0; d < p; ++d) model.means[d] /= double(n);

    // Unbiased covariance (n-1 divisor).
    Matrix cov(p, p);
    for (std::size_t k = 0; k < n; ++k) {
        const auto x = data.point(k);
        for (std::size_t i = 0; i < p; ++i) {
            const double di = x[i] - model.means[i];
            for (std::size_t j = 0; j < p; ++j) {
                cov.at(i, j) += di * (x[j] - model.means[j]);
            }
        }
    }
    for (double& v : cov.data) v /= double(n - 1);

    model.variances.resize(p);
    for (std::size_t d = 0; d < p; ++d) model.variances[d] = cov.at(d, d);

    model.correlations = Matrix(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const double denom = std::sqrt(model.variances[i] * model.variances[j]);
            model.correlations.at(i, j) =
                (i == j) ? 1.0 : (denom > 0.0 ? cov.at(i, j) / denom : 0.0);
        }
    }

    model.inverse_covariance = invert(cov);
    return model;
}

double euclidean_sq(std::span<const double> x, std::span<const double> y) {
    check_dims(x.size(), y.size());
    double sum = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double diff = x[d] - y[d];
        sum += diff * diff;
    }
    return sum;
}

double mahalanobis_sq(std::span<const double> x, std::span<const double> y,
                      const CovarianceModel& model) {
    check_dims(x.size(), y.size());
    check_dims(x.size(), model.dim());
    const Matrix& a = model.inverse_covariance;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double di = x[i] - y[i];
        for (std::size_t j = 0; j < x.size(); ++j) {
            sum += a.at(i, j) * di * (x[j] - y[j]);
        }
    }
    return sum;
}

PointDistance PointDistance::euclidean() {
    return PointDistance(Norm::Euclidean, CovarianceModel{});
}

PointDistance PointDistance::mahalanobis(CovarianceModel model) {
    return PointDistance(Norm::Mahalanobis, std::move(model));
}

PointDistance PointDistance::for_dataset(const Dataset& data, Norm norm) {
    if (norm == Norm::Euclidean) return euclidean();
    try {
        return mahalanobis(fit_covariance(data));
    } catch (const SingularCovariance&) {
        return euclidean();
    }
}

void NonLocalConfig::validate() const {
    if (neighborhood_radius < 1) throw InvalidParameters("neighborhood radius must be >= 1");
    if (search_radius < neighborhood_radius) {
        throw InvalidParameters("search radius must be >= neighborhood radius");
    }
    if (patch_radius < 0) throw InvalidParameters("patch radius must be >= 0");
    if (!(bandwidth > 0.0)) throw InvalidParameters("bandwidth h must be > 0");
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw InvalidParameters("lambda must lie in [0,1]");
    }
}

namespace {

void check_pixel(const GrayImage& image, std::size_t j) {
    if (j >= image.pixel_count()) {
        throw InvalidParameters("pixel index " + std::to_string(j) +
                                " out of bounds for " + std::to_string(image.width) +
                                "x" + std::to_string(image.height) + " image");
    }
}

/// Symmetric mirror for out-of-range coordinates (edge pixel repeated), valid
/// for any offset magnitude.
std::size_t mirror(long t, std::size_t n) {
    const long period = 2 * long(n);
    long m = t % period;
    if (m < 0) m += period;
    if (m >= long(n)) m = period - 1 - m;
    return std::size_t(m);
}

double patch_distance_sq(const GrayImage& image, long xa, long ya, long xb, long yb,
                         int r_p) {
    double sum = 0.0;
    for (long dy = -r_p; dy <= r_p; ++dy) {
        const std::size_t ya_m = mirror(ya + dy, image.height);
        const std::size_t yb_m = mirror(yb + dy, image.height);
        for (long dx = -r_p; dx <= r_p; ++dx) {
            const double va = image.at(mirror(xa + dx, image.width), ya_m);
            const double vb = image.at(mirror(xb + dx, image.width), yb_m);
            const double diff = va - vb;
            sum += diff * diff;
        }
    }
    return sum;
}

}  // namespace

WeightMap local_weights(const GrayImage& image, std::size_t j,
                        const NonLocalConfig& cfg) {
    cfg.validate();
    check_pixel(image, j);
    const long jx = long(j % image.width);
    const long jy = long(j / image.width);
    const int r = cfg.neighborhood_radius;
    const double sigma_sq = double(r) * double(r);  // sigma_s = r_l

    WeightMap weights;
    weights.reserve(std::size_t(2 * r + 1) * std::size_t(2 * r + 1));
    for (long y = jy - r; y <= jy + r; ++y) {
        if (y < 0 || y >= long(image.height)) continue;
        for (long x = jx - r; x <= jx + r; ++x) {
            if (x < 0 || x >= long(image.width)) continue;
            if (x == jx && y == jy) continue;
            const double dx = double(x - jx);
            const double dy = double(y - jy);
            const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_sq));
            weights.push_back({std::uint32_t(y * long(image.width) + x), w});
        }
    }
    return weights;
}

WeightMap nonlocal_weights(const GrayImage& image, std::size_t j,
                           const NonLocalConfig& cfg) {
    cfg.validate();
    check_pixel(image, j);
    const long jx = long(j % image.width);
    const long jy = long(j / image.width);
    const int r = cfg.search_radius;
    const double h_sq = cfg.bandwidth * cfg.bandwidth;

    WeightMap weights;
    weights.reserve(std::size_t(2 * r + 1) * std::size_t(2 * r + 1));
    std::vector<double> dist;
    dist.reserve(weights.capacity());
    double best = std::numeric_limits<double>::infinity();
    for (long y = jy - r; y <= jy + r; ++y) {
        if (y < 0 || y >= long(image.height)) continue;
        for (long x = jx - r; x <= jx + r; ++x) {
            if (x < 0 || x >= long(image.width)) continue;
            if (x == jx && y == jy) continue;
            const double d = patch_distance_sq(image, x, y, jx, jy, cfg.patch_radius);
            weights.push_back({std::uint32_t(y * long(image.width) + x), 0.0});
            dist.push_back(d);
            best = std::min(best, d);
        }
    }
    if (weights.empty()) return weights;

    // Shifting by the best patch distance keeps the strongest raw weight at
    // exactly 1, so the sum cannot underflow; after normalization this equals
    // exp(-d/h^2)/sum exactly in real arithmetic.
    double sum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double w = std::exp(-(dist[k] - best) / h_sq);
        weights[k].weight = w;
        sum += w;
    }
    for (auto& e : weights) e.weight /= sum;
    return weights;
}

double mixed_distance(const GrayImage& image, std::size_t j, double center,
                      const NonLocalConfig& cfg) {
    const WeightMap local = local_weights(image, j, cfg);
    const WeightMap nonlocal = nonlocal_weights(image, j, cfg);
    return internal::combine_mixed(image, local, internal::weight_sum(local),
                                   nonlocal, j, center, cfg.lambda);
}

}  // namespace fuzzyseg
