#pragma once

#include <vector>

#include "fuzzyseg/core.hpp"
#include "fuzzyseg/distance.hpp"

namespace fuzzyseg {

enum class PcmEtaMode {
    FixedFromInit,  // eta estimated once from the FCM initialization
    PerIteration,   // eta re-estimated from the current partition every iteration
};

struct PcmParams {
    SolverParams base;
    PcmEtaMode eta_mode = PcmEtaMode::FixedFromInit;
    double k_scale = 1.0;  // multiplier K on the eta estimate, > 0

    void validate() const;
};

/// PCM output. Memberships are possibilistic: entries in (0,1] with no
/// column-sum constraint.
struct PcmResult {
    Matrix membership;
    Centroids centroids;
    std::vector<double> eta;  // per-cluster distance scale, > 0
    std::size_t iterations = 0;
    std::vector<double> objective_trace;
    bool converged = false;
};

struct FpcmParams {
    SolverParams base;
    double eta_exp = 2.0;  // typicality exponent, > 1

    void validate() const;
};

// --- Shared update steps ---------------------------------------------------

/// v_i = sum_k w_ik^m x_k / sum_k w_ik^m. Works for fuzzy and possibilistic
/// weight matrices alike. Throws EmptyClusterError on a zero denominator.
Centroids fcm_centers(const Matrix& weights, const Dataset& data, double m);

/// mu_ik = [ sum_j (d_ik / d_jk)^(2/(m-1)) ]^-1. Points at zero distance from
/// one or more centers split membership 1 equally among those clusters.
MembershipMatrix fcm_memberships(const Dataset& data, const Centroids& v,
                                 double m, const PointDistance& dist);

/// J_m = sum_k sum_i mu_ik^m ||x_k - v_i||^2.
double fcm_objective(const MembershipMatrix& u, const Centroids& v,
                     const Dataset& data, double m, const PointDistance& dist);

SegmentationResult run_fcm(const Dataset& data, const SolverParams& params,
                           const IterationObserver& observer = {});

// --- PCM -------------------------------------------------------------------

/// eta_i = K * sum_k mu_ik^m d_ik^2 / sum_k mu_ik^m, the fuzzy intra-cluster
/// spread — the standard estimator for the per-cluster distance scale at
/// which membership crosses 0.5. Throws DegenerateEtaError when a cluster has
/// no spread (all member distances zero).
std::vector<double> pcm_eta(const Matrix& u, const Dataset& data,
                            const Centroids& v, double m, double k_scale,
                            const PointDistance& dist = PointDistance::euclidean());

/// mu_ij = 1 / (1 + (d_ij^2 / eta_i)^(1/(m-1))). Columns are not constrained
/// to sum to 1; entries stay in (0,1].
Matrix pcm_memberships(const Dataset& data, const Centroids& v,
                       const std::vector<double>& eta, double m,
                       const PointDistance& dist = PointDistance::euclidean());

/// Possibilistic run seeded from a full converged FCM pass (cold-started PCM
/// collapses clusters). Objective: sum mu^m d^2 + sum_i eta_i sum_j (1-mu)^m.
PcmResult run_pcm(const Dataset& data, const PcmParams& params,
                  const IterationObserver& observer = {});

// --- FPCM ------------------------------------------------------------------

/// Same update as fcm_memberships (membership is relative across clusters).
MembershipMatrix fpcm_memberships(const Dataset& data, const Centroids& v,
                                  double m, const PointDistance& dist);

/// t_ik = [ sum_{j=1..n} (D_ik / D_ij)^(2/(eta-1)) ]^-1: typicality of point k
/// for cluster i relative to all n data points; each row sums to 1. Points at
/// zero distance from center i split the row's typicality equally.
TypicalityMatrix fpcm_typicalities(const Dataset& data, const Centroids& v,
                                   double eta_exp, const PointDistance& dist);

/// v_i = sum_k (u_ik^m + t_ik^eta) x_k / sum_k (u_ik^m + t_ik^eta).
Centroids fpcm_centers(const MembershipMatrix& u, const TypicalityMatrix& t,
                       const Dataset& data, double m, double eta_exp);

/// J_{m,eta} = sum_i sum_k (u_ik^m + t_ik^eta) D_ik^2.
double fpcm_objective(const MembershipMatrix& u, const TypicalityMatrix& t,
                      const Centroids& v, const Dataset& data, double m,
                      double eta_exp, const PointDistance& dist);

SegmentationResult run_fpcm(const Dataset& data, const FpcmParams& params,
                            const IterationObserver& observer = {});

}  // namespace fuzzyseg
