#include "fuzzyseg/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "solver_internal.hpp"

namespace fuzzyseg {

namespace internal {

SegmentationResult run_fuzzy_loop(const Dataset& data, const SolverParams& params,
                                  const FillDistances& fill,
                                  const IterationObserver& observer) {
    params.validate();
    const std::size_t n = data.size();
    if (n < params.c) throw InvalidParameters("need at least c data points");

    Matrix u = init_membership(params.c, n, params.seed).values;
    Matrix d2(params.c, n);
    Centroids v;
    std::vector<double> trace;
    std::size_t iterations = 0;
    bool done = false;

    while (iterations < params.max_iter && !done) {
        ++iterations;
        v = fcm_centers(u, data, params.m);
        fill(v, d2);
        Matrix u_next = internal::memberships_from_d2(d2, params.m);
        const double objective = internal::objective_from_d2(u_next, d2, params.m);
        trace.push_back(objective);
        const double delta = max_abs_diff(u, u_next);
        u = std::move(u_next);
        done = delta <= params.epsilon;
        if (observer) {
            observer(IterationState{iterations, u, nullptr, v, objective, delta});
        }
    }

    SegmentationResult result;
    result.labels = argmax_labels(u);
    result.membership = MembershipMatrix(std::move(u));
    result.centroids = std::move(v);
    result.iterations = iterations;
    result.objective_trace = std::move(trace);
    result.converged = done;
    return result;
}

}  // namespace internal

void PcmParams::validate() const {
    base.validate();
    if (!(k_scale > 0.0)) throw InvalidParameters("eta scale K must be > 0");
}

void FpcmParams::validate() const {
    base.validate();
    if (!(eta_exp > 1.0)) throw InvalidParameters("typicality exponent must be > 1");
}

Centroids fcm_centers(const Matrix& weights, const Dataset& data, double m) {
    if (weights.cols != data.size()) {
        throw InvalidParameters("weight matrix has " + std::to_string(weights.cols) +
                                " columns for " + std::to_string(data.size()) +
                                " points");
    }
    const std::size_t c = weights.rows;
    const std::size_t p = data.dim;
    Centroids v(p, std::vector<double>(c * p, 0.0));
    std::vector<double> num(p);
    for (std::size_t i = 0; i < c; ++i) {
        std::fill(num.begin(), num.end(), 0.0);
        double den = 0.0;
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double w = std::pow(weights.at(i, k), m);
            den += w;
            const auto x = data.point(k);
            for (std::size_t d = 0; d < p; ++d) num[d] += w * x[d];
        }
        if (den == 0.0) {
            throw EmptyClusterError("cluster " + std::to_string(i) +
                                    " has no membership mass");
        }
        for (std::size_t d = 0; d < p; ++d) v.at(i, d) = num[d] / den;
    }
    return v;
}

MembershipMatrix fcm_memberships(const Dataset& data, const Centroids& v, double m,
                                 const PointDistance& dist) {
    if (!(m > 1.0)) throw InvalidParameters("fuzzifier m must be > 1");
    Matrix d2(v.count(), data.size());
    internal::fill_pointwise_d2(data, v, dist, d2);
    return MembershipMatrix(internal::memberships_from_d2(d2, m));
}

double fcm_objective(const MembershipMatrix& u, const Centroids& v,
                     const Dataset& data, double m, const PointDistance& dist) {
    if (u.points() != data.size() || u.clusters() != v.count()) {
        throw InvalidParameters("objective shapes disagree");
    }
    Matrix d2(v.count(), data.size());
    internal::fill_pointwise_d2(data, v, dist, d2);
    return internal::objective_from_d2(u.values, d2, m);
}

SegmentationResult run_fcm(const Dataset& data, const SolverParams& params,
                           const IterationObserver& observer) {
    const PointDistance dist = PointDistance::for_dataset(data, params.norm);
    return internal::run_fuzzy_loop(
        data, params,
        [&](const Centroids& v, Matrix& d2) {
            internal::fill_pointwise_d2(data, v, dist, d2);
        },
        observer);
}

// --- PCM ---------------------------------------------------------------------

namespace {

std::vector<double> pcm_eta_from_d2(const Matrix& u, const Matrix& d2, double m,
                                    double k_scale) {
    std::vector<double> eta(u.rows);
    for (std::size_t i = 0; i < u.rows; ++i) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < u.cols; ++k) {
            const double w = std::pow(u.at(i, k), m);
            num += w * d2.at(i, k);
            den += w;
        }
        if (num == 0.0 || den == 0.0) {
            throw DegenerateEtaError("cluster " + std::to_string(i) +
                                     " has zero fuzzy spread; eta would be 0");
        }
        eta[i] = k_scale * num / den;
    }
    return eta;
}

Matrix pcm_memberships_from_d2(const Matrix& d2, const std::vector<double>& eta,
                               double m) {
    const double expo = 1.0 / (m - 1.0);
    Matrix u(d2.rows, d2.cols);
    for (std::size_t i = 0; i < d2.rows; ++i) {
        for (std::size_t k = 0; k < d2.cols; ++k) {
            const double mu = 1.0 / (1.0 + std::pow(d2.at(i, k) / eta[i], expo));
            // mu > 0 in exact arithmetic; keep it that way if pow overflowed.
            u.at(i, k) = std::max(mu, std::numeric_limits<double>::min());
        }
    }
    return u;
}

double pcm_objective_from_d2(const Matrix& u, const Matrix& d2,
                             const std::vector<double>& eta, double m) {
    double sum = internal::objective_from_d2(u, d2, m);
    for (std::size_t i = 0; i < u.rows; ++i) {
        double penalty = 0.0;
        for (std::size_t k = 0; k < u.cols; ++k) {
            penalty += std::pow(1.0 - u.at(i, k), m);
        }
        sum += eta[i] * penalty;
    }
    return sum;
}

}  // namespace

std::vector<double> pcm_eta(const Matrix& u, const Dataset& data,
                            const Centroids& v, double m, double k_scale,
                            const PointDistance& dist) {
    if (u.cols != data.size() || u.rows != v.count()) {
        throw InvalidParameters("eta shapes disagree");
    }
    if (!(k_scale > 0.0)) throw InvalidParameters("eta scale K must be > 0");
    Matrix d2(v.count(), data.size());
    internal::fill_pointwise_d2(data, v, dist, d2);
    return pcm_eta_from_d2(u, d2, m, k_scale);
}

Matrix pcm_memberships(const Dataset& data, const Centroids& v,
                       const std::vector<double>& eta, double m,
                       const PointDistance& dist) {
    if (!(m > 1.0)) throw InvalidParameters("fuzzifier m must be > 1");
    if (eta.size() != v.count()) throw InvalidParameters("eta size != cluster count");
    for (double e : eta) {
        if (!(e > 0.0)) throw InvalidParameters("every eta_i must be > 0");
    }
    Matrix d2(v.count(), data.size());
    internal::fill_pointwise_d2(data, v, dist, d2);
    return pcm_memberships_from_d2(d2, eta, m);
}

PcmResult run_pcm(const Dataset& data, const PcmParams& params,
                  const IterationObserver& observer) {
    params.validate();
    const SolverParams& base = params.base;
    if (data.size() < base.c) throw InvalidParameters("need at least c data points");

    // Possibilistic partitions collapse from cold starts; seed from FCM.
    SegmentationResult fcm = run_fcm(data, base);
    const PointDistance dist = PointDistance::for_dataset(data, base.norm);

    Centroids v = std::move(fcm.centroids);
    Matrix u = std::move(fcm.membership.values);
    Matrix d2(base.c, data.size());
    internal::fill_pointwise_d2(data, v, dist, d2);
    std::vector<double> eta = pcm_eta_from_d2(u, d2, base.m, params.k_scale);

    std::vector<double> trace;
    std::size_t iterations = 0;
    bool done = false;
    while (iterations < base.max_iter && !done) {
        ++iterations;
        internal::fill_pointwise_d2(data, v, dist, d2);
        Matrix u_next = pcm_memberships_from_d2(d2, eta, base.m);
        v = fcm_centers(u_next, data, base.m);
        internal::fill_pointwise_d2(data, v, dist, d2);
        if (params.eta_mode == PcmEtaMode::PerIteration) {
            eta = pcm_eta_from_d2(u_next, d2, base.m, params.k_scale);
        }
        const double objective = pcm_objective_from_d2(u_next, d2, eta, base.m);
        trace.push_back(objective);
        const double delta = max_abs_diff(u, u_next);
        u = std::move(u_next);
        done = delta <= base.epsilon;
        if (observer) {
            observer(IterationState{iterations, u, nullptr, v, objective, delta});
        }
    }

    PcmResult result;
    result.membership = std::move(u);
    result.centroids = std::move(v);
    result.eta = std::move(eta);
    result.iterations = iterations;
    result.objective_trace = std::move(trace);
    result.converged = done;
    return result;
}

// --- FPCM --------------------------------------------------------------------

namespace {

Matrix typicalities_from_d2(const Matrix& d2, double eta_exp) {
    const double expo = 1.0 / (eta_exp - 1.0);
    const std::size_t c = d2.rows;
    const std::size_t n = d2.cols;
    Matrix t(c, n);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < c; ++i) {
        std::size_t zero_count = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double p = std::pow(d2.at(i, k), expo);
            q[k] = p;
            if (d2.at(i, k) == 0.0 || p == 0.0) ++zero_count;
        }
        if (zero_count > 0) {
            const double share = 1.0 / double(zero_count);
            for (std::size_t k = 0; k < n; ++k) {
                t.at(i, k) = (d2.at(i, k) == 0.0 || q[k] == 0.0) ? share : 0.0;
            }
            continue;
        }
        double inv_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) inv_sum += 1.0 / q[k];
        for (std::size_t k = 0; k < n; ++k) {
            t.at(i, k) = std::min(1.0, 1.0 / (q[k] * inv_sum));
        }
    }
    return t;
}

Centroids fpcm_centers_impl(const Matrix& u, const Matrix& t, const Dataset& data,
                            double m, double eta_exp) {
    const std::size_t c = u.rows;
    const std::size_t p = data.dim;
    Centroids v(p, std::vector<double>(c * p, 0.0));
    std::vector<double> num(p);
    for (std::size_t i = 0; i < c; ++i) {
        std::fill(num.begin(), num.end(), 0.0);
        double den = 0.0;
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double w = std::pow(u.at(i, k), m) + std::pow(t.at(i, k), eta_exp);
            den += w;
            const auto x = data.point(k);
            for (std::size_t d = 0; d < p; ++d) num[d] += w * x[d];
        }
        if (den == 0.0) {
            throw EmptyClusterError("cluster " + std::to_string(i) +
                                    " has no membership or typicality mass");
        }
        for (std::size_t d = 0; d < p; ++d) v.at(i, d) = num[d] / den;
    }
    return v;
}

double fpcm_objective_from_d2(const Matrix& u, const Matrix& t, const Matrix& d2,
                              double m, double eta_exp) {
    double sum = 0.0;
    for (std::size_t i = 0; i < u.rows; ++i) {
        for (std::size_t k = 0; k < u.cols; ++k) {
            sum += (std::pow(u.at(i, k), m) + std::pow(t.at(i, k), eta_exp)) *
                   d2.at(i, k);
        }
    }
    return sum;
}

}  // namespace

MembershipMatrix fpcm_memberships(const Dataset& data, const Centroids& v, double m,
                                  const PointDistance& dist) {
    return fcm_memberships(data, v, m, dist);  // same necessary condition
}

TypicalityMatrix fpcm_typicalities(const Dataset& data, const Centroids& v,
                                   double eta_exp, const PointDistance& dist) {
    if (!(eta_exp > 1.0)) throw InvalidParameters("typicality exponent must be > 1");
    Matrix d2(v.count(), data.size());
    internal::fill_pointwise_d2(data, v, dist, d2);
    return TypicalityMatrix(typicalities_from_d2(d2, eta_exp));
}

Centroids fpcm_centers(const MembershipMatrix& u, const TypicalityMatrix& t,
                       const Dataset& data, double m, double eta_exp) {
    if (!u.values.same_shape(t.values) || u.points() != data.size()) {
        throw InvalidParameters("fpcm center shapes disagree");
    }
    return fpcm_centers_impl(u.values, t.values, data, m, eta_exp);
}

double fpcm_objective(const MembershipMatrix& u, const TypicalityMatrix& t,
                      const Centroids& v, const Dataset& data, double m,
                      double eta_exp, const PointDistance& dist) {
    if (!u.values.same_shape(t.values) || u.points() != data.size() ||
        u.clusters() != v.count()) {
        throw InvalidParameters("fpcm objective shapes disagree");
    }
    Matrix d2(v.count(), data.size());
    internal::fill_pointwise_d2(data, v, dist, d2);
    return fpcm_objective_from_d2(u.values, t.values, d2, m, eta_exp);
}

SegmentationResult run_fpcm(const Dataset& data, const FpcmParams& params,
                            const IterationObserver& observer) {
    params.validate();
    const SolverParams& base = params.base;
    const std::size_t n = data.size();
    if (n < base.c) throw InvalidParameters("need at least c data points");
    const PointDistance dist = PointDistance::for_dataset(data, base.norm);

    Matrix u = init_membership(base.c, n, base.seed).values;
    Centroids v = fcm_centers(u, data, base.m);
    Matrix d2(base.c, n);
    Matrix t;
    std::vector<double> trace;
    std::size_t iterations = 0;
    bool done = false;

    while (iterations < base.max_iter && !done) {
        ++iterations;
        internal::fill_pointwise_d2(data, v, dist, d2);
        Matrix u_next = internal::memberships_from_d2(d2, base.m);
        t = typicalities_from_d2(d2, params.eta_exp);
        v = fpcm_centers_impl(u_next, t, data, base.m, params.eta_exp);
        internal::fill_pointwise_d2(data, v, dist, d2);
        const double objective =
            fpcm_objective_from_d2(u_next, t, d2, base.m, params.eta_exp);
        trace.push_back(objective);
        const double delta = max_abs_diff(u, u_next);
        u = std::move(u_next);
        done = delta <= base.epsilon;
        if (observer) {
            observer(IterationState{iterations, u, &t, v, objective, delta});
        }
    }

    SegmentationResult result;
    result.labels = argmax_labels(u);
    result.membership = MembershipMatrix(std::move(u));
    result.typicality = TypicalityMatrix(std::move(t));
    result.centroids = std::move(v);
    result.iterations = iterations;
    result.objective_trace = std::move(trace);
    result.converged = done;
    return result;
}

}  // namespace fuzzyseg
