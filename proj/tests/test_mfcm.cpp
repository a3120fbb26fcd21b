#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fuzzyseg/clustering.hpp"
#include "fuzzyseg/metrics.hpp"
#include "fuzzyseg/mfcm.hpp"
#include "fuzzyseg/phantom.hpp"
#include "oracles.hpp"

using namespace fuzzyseg;

namespace {

/// 48x48 single-disk phantom with generous margins.
PhantomSpec disk_spec() {
    PhantomSpec spec;
    spec.width = 48;
    spec.height = 48;
    spec.background_intensity = 0.25;
    spec.object_intensity = 0.75;
    spec.disks = {{24.0, 24.0, 12.0}};
    return spec;
}

/// Full-height vertical strip: every boundary pixel has exact patch twins in
/// its search window, so the noiseless segmentation is pixel-perfect.
PhantomSpec strip_spec() {
    PhantomSpec spec;
    spec.width = 32;
    spec.height = 32;
    spec.background_intensity = 0.25;
    spec.object_intensity = 0.75;
    spec.rects = {{12.0, 0.0, 8.0, 32.0}};
    return spec;
}

EvalReport score(const std::vector<std::size_t>& labels, const Phantom& ph,
                 std::size_t c) {
    const auto object_clusters = match_clusters(labels, ph.mask, c);
    const BinaryMask seg =
        labels_to_mask(labels, ph.image.width, ph.image.height, object_clusters);
    return evaluate(seg, ph.mask);
}

}  // namespace

TEST_CASE("precompute_weights") {
    NonLocalConfig cfg;
    cfg.search_radius = 3;
    cfg.patch_radius = 1;

    SUBCASE("constant image yields uniform non-local tables") {
        const GrayImage constant(16, 16, std::vector<double>(256, 0.5));
        const WeightTables tables = precompute_weights(constant, cfg);
        REQUIRE(tables.pixels.size() == 256);
        for (std::size_t j : {0u, 40u, 255u}) {
            const auto& nl = tables.pixels[j].nonlocal;
            REQUIRE(!nl.empty());
            for (const auto& e : nl) {
                CHECK(e.weight == doctest::Approx(1.0 / double(nl.size()))
                                      .epsilon(1e-12));
            }
        }
    }

    SUBCASE("recomputation is identical and matches single-pixel calls") {
        PhantomSpec spec = disk_spec();
        spec.noise = {NoiseKind::Gaussian, 0.1, 0.0};
        spec.seed = 4;
        const Phantom ph = generate(spec);
        const WeightTables a = precompute_weights(ph.image, cfg);
        const WeightTables b = precompute_weights(ph.image, cfg);
        REQUIRE(a.pixels.size() == b.pixels.size());
        for (std::size_t j : {0u, 100u, 1000u, 2303u}) {
            CHECK(a.pixels[j].local_sum == b.pixels[j].local_sum);
            const WeightMap local = local_weights(ph.image, j, cfg);
            const WeightMap nonlocal = nonlocal_weights(ph.image, j, cfg);
            REQUIRE(a.pixels[j].local.size() == local.size());
            for (std::size_t t = 0; t < local.size(); ++t) {
                CHECK(a.pixels[j].local[t].pixel == local[t].pixel);
                CHECK(a.pixels[j].local[t].weight == local[t].weight);
            }
            REQUIRE(a.pixels[j].nonlocal.size() == nonlocal.size());
            for (std::size_t t = 0; t < nonlocal.size(); ++t) {
                CHECK(a.pixels[j].nonlocal[t].pixel == nonlocal[t].pixel);
                CHECK(a.pixels[j].nonlocal[t].weight == nonlocal[t].weight);
            }
        }
    }

    SUBCASE("threaded precompute is bitwise identical to sequential") {
        PhantomSpec spec = disk_spec();
        spec.noise = {NoiseKind::Gaussian, 0.15, 0.0};
        const Phantom ph = generate(spec);
        const WeightTables seq = precompute_weights(ph.image, cfg, 0);
        const WeightTables par = precompute_weights(ph.image, cfg, 4);
        REQUIRE(seq.pixels.size() == par.pixels.size());
        for (std::size_t j = 0; j < seq.pixels.size(); ++j) {
            REQUIRE(seq.pixels[j].nonlocal.size() == par.pixels[j].nonlocal.size());
            for (std::size_t t = 0; t < seq.pixels[j].nonlocal.size(); ++t) {
                CHECK(seq.pixels[j].nonlocal[t].weight ==
                      par.pixels[j].nonlocal[t].weight);
            }
        }
    }

    SUBCASE("cached mixed distance equals the single-pixel call exactly") {
        PhantomSpec spec = disk_spec();
        spec.noise = {NoiseKind::SaltPepper, 0.0, 0.05};
        const Phantom ph = generate(spec);
        NonLocalConfig full;  // defaults: r_l=2, r_s=5, r_p=2, h=0.1
        const WeightTables tables = precompute_weights(ph.image, full);
        for (std::size_t j : {0u, 17u, 320u, 2303u}) {
            for (double center : {0.25, 0.6}) {
                CHECK(mixed_distance_cached(ph.image, tables, j, center, full.lambda) ==
                      mixed_distance(ph.image, j, center, full));
            }
        }
    }
}

TEST_CASE("mfcm_memberships") {
    SUBCASE("noiseless two-intensity image is crisply classified") {
        const Phantom ph = generate(strip_spec());
        MfcmParams params;
        const WeightTables tables = precompute_weights(ph.image, params.nl);
        const Centroids v(1, {0.25, 0.75});
        const MembershipMatrix u = mfcm_memberships(ph.image, v, params, tables);
        const auto labels = argmax_labels(u.values);
        for (std::size_t k = 0; k < labels.size(); ++k) {
            CHECK(labels[k] == (ph.mask.bits[k] ? 1u : 0u));
        }
    }

    SUBCASE("a salt pixel keeps higher region membership than under FCM") {
        // homogeneous 0.25 image with one bright pixel in the middle
        std::vector<double> values(16 * 16, 0.25);
        const std::size_t salt = 8 * 16 + 8;
        values[salt] = 1.0;
        const GrayImage img(16, 16, std::move(values));
        const Centroids v(1, {0.25, 1.0});

        MfcmParams params;  // lambda = 0.5 and the documented defaults
        const WeightTables tables = precompute_weights(img, params.nl);
        const MembershipMatrix mfcm_u = mfcm_memberships(img, v, params, tables);
        const MembershipMatrix fcm_u =
            fcm_memberships(to_dataset(img), v, 2.0, PointDistance::euclidean());
        CHECK(mfcm_u.at(0, salt) > fcm_u.at(0, salt));
        CHECK(mfcm_u.at(0, salt) > 0.5);  // the neighborhood wins
        CHECK(fcm_u.at(0, salt) == 0.0);  // pointwise FCM pins it to the bright cluster
    }
}

TEST_CASE("run_mfcm") {
    SUBCASE("noiseless phantom segments exactly") {
        const Phantom ph = generate(strip_spec());
        MfcmParams params;
        params.base.seed = 1;
        const SegmentationResult r = run_mfcm(ph.image, params);
        const EvalReport rep = score(r.labels, ph, 2);
        CHECK(rep.similarity == doctest::Approx(100.0));
        CHECK(r.converged);
    }

    SUBCASE("beats FCM on a noisy phantom") {
        PhantomSpec spec = disk_spec();
        spec.noise = {NoiseKind::Gaussian, 0.15, 0.0};
        spec.seed = 6;
        const Phantom ph = generate(spec);
        MfcmParams params;
        params.base.seed = 6;
        const SegmentationResult mfcm_r = run_mfcm(ph.image, params);
        const SegmentationResult fcm_r = run_fcm(to_dataset(ph.image), params.base);
        const double mfcm_sim = score(mfcm_r.labels, ph, 2).similarity;
        const double fcm_sim = score(fcm_r.labels, ph, 2).similarity;
        CHECK(mfcm_sim >= fcm_sim);
    }

    SUBCASE("deterministic per seed, including across thread counts") {
        PhantomSpec spec = disk_spec();
        spec.noise = {NoiseKind::Gaussian, 0.1, 0.0};
        const Phantom ph = generate(spec);
        MfcmParams params;
        const SegmentationResult a = run_mfcm(ph.image, params, {}, 0);
        const SegmentationResult b = run_mfcm(ph.image, params, {}, 4);
        CHECK(a.labels == b.labels);
        CHECK(a.membership.values.data == b.membership.values.data);
        CHECK(a.objective_trace == b.objective_trace);
    }

    SUBCASE("membership columns sum to one at every iteration") {
        PhantomSpec spec = disk_spec();
        spec.noise = {NoiseKind::SaltPepper, 0.0, 0.08};
        const Phantom ph = generate(spec);
        MfcmParams params;
        params.base.max_iter = 15;
        run_mfcm(ph.image, params, [](const IterationState& st) {
            for (std::size_t k = 0; k < st.membership.cols; ++k) {
                double col = 0.0;
                for (std::size_t i = 0; i < st.membership.rows; ++i) {
                    col += st.membership.at(i, k);
                }
                CHECK(std::abs(col - 1.0) <= 1e-9);
            }
        });
    }

    SUBCASE("constant image with lambda 0 reproduces the FCM trajectory") {
        const GrayImage constant(12, 12, std::vector<double>(144, 0.5));
        SolverParams base;
        base.seed = 9;
        std::vector<Matrix> fcm_traj;
        run_fcm(to_dataset(constant), base, [&](const IterationState& st) {
            fcm_traj.push_back(st.membership);
        });
        MfcmParams params;
        params.base = base;
        params.nl.lambda = 0.0;
        std::vector<Matrix> mfcm_traj;
        run_mfcm(constant, params, [&](const IterationState& st) {
            mfcm_traj.push_back(st.membership);
        });
        REQUIRE(fcm_traj.size() == mfcm_traj.size());
        for (std::size_t t = 0; t < fcm_traj.size(); ++t) {
            CHECK(max_abs_diff(fcm_traj[t], mfcm_traj[t]) <= 1e-12);
        }
    }

    SUBCASE("mixed distance stays inside the window's pointwise bounds") {
        PhantomSpec spec = disk_spec();
        spec.noise = {NoiseKind::Gaussian, 0.2, 0.0};
        spec.seed = 3;
        const Phantom ph = generate(spec);
        NonLocalConfig cfg;
        const WeightTables tables = precompute_weights(ph.image, cfg);
        for (std::size_t j : {5u, 700u, 1500u}) {
            const auto& entry = tables.pixels[j];
            for (double center : {0.2, 0.5, 0.9}) {
                double lo = 1e300, hi = -1e300;
                auto fold_in = [&](const WeightMap& w) {
                    for (const auto& e : w) {
                        const double diff = ph.image.intensities[e.pixel] - center;
                        lo = std::min(lo, diff * diff);
                        hi = std::max(hi, diff * diff);
                    }
                };
                fold_in(entry.local);
                fold_in(entry.nonlocal);
                const double mixed =
                    mixed_distance_cached(ph.image, tables, j, center, cfg.lambda);
                CHECK(mixed >= lo - 1e-12);
                CHECK(mixed <= hi + 1e-12);
            }
        }
    }
}
