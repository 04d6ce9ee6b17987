#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "livsic/colligation.hpp"
#include "livsic/factorize.hpp"

namespace livsic {

struct DiscreteModelData {
    std::vector<cplx> lambdas;
    std::vector<Vec> etas;

    std::size_t size() const { return lambdas.size(); }
};

DiscreteModelData discrete_data(const BlaschkeProduct& bp);

// Samples of a(t) and xi(t) on [0, ell]; values between samples are linear
// interpolants. xi(t) is r x q; p is the largest rank of xi xi* over the
// samples (threshold 1e-10).
struct ContinuousModelData {
    double ell = 1;
    std::vector<double> t;
    std::vector<double> a;
    std::vector<Mat> xi;
    Eigen::Index p = 0;

    static ContinuousModelData sample(double ell, const std::function<double(double)>& a,
                                      const std::function<Mat(double)>& xi, int samples);
    // xi(t) chosen as a factor of the density E(t) = xi xi* (eigenvector gauge,
    // zero columns padded up to the largest rank).
    static ContinuousModelData from_density(double ell, const std::function<double(double)>& a,
                                            const std::function<Mat(double)>& E, int samples);

    double a_at(double x) const;
    Mat xi_at(double x) const;
    Eigen::Index r() const { return xi.empty() ? 0 : xi.front().rows(); }
    Eigen::Index width() const { return xi.empty() ? 0 : xi.front().cols(); }
};

Eigen::Index rank_parameter(const std::vector<Mat>& xi);

// a = 0, xi = 1, r = 1: the integration operator on [0, ell].
ContinuousModelData integration_operator_data(double ell);

struct CombinedModel {
    DiscreteModelData discrete;
    std::size_t K = static_cast<std::size_t>(-1);  // truncation; default keeps everything
    std::optional<ContinuousModelData> continuous;
    int N = 0;  // cells for the continuous part
};

// ||sum_{k >= K} eta_k eta_k*||
double truncation_tail(const DiscreteModelData& d, std::size_t K);

Colligation build_discrete_model(const DiscreteModelData& d, const Signature& J);

// Midpoint cells of width ell/N. Coordinates are sqrt(ell/N) h(x_j).
Colligation build_continuous_model(const ContinuousModelData& cmd, const Signature& J, int N);

Colligation build_combined_model(const CombinedModel& cm, const Signature& J);

// S(z) from the discrete recursion and the cell-by-cell continuous product,
// without forming the resolvent of the full model.
Mat model_charfn(const CombinedModel& cm, const Signature& J, cplx z);

// Continuous part through dW/dt = W (i/(z - a(t))) xi xi* J.
Mat continuous_charfn_ode(const ContinuousModelData& cmd, const Signature& J, cplx z, double tol);

// Model colligation built from the spectral decomposition of Re A.
Colligation spectral_model(const Colligation& c);

struct RedundantPart {
    SubspaceBasis basis;
    Eigen::Index discrete_dim = 0;
    double discrete_leak = 0;  // largest discrete coordinate of the redundant basis
};

RedundantPart model_redundant_part(const CombinedModel& cm, const Signature& J, double tol = 1e-9);

struct UnicellularEntry {
    double sigma;
    Eigen::Index dim;
    double invariance_residual;
    cplx S_at_i;
};

struct UnicellularReport {
    std::vector<UnicellularEntry> entries;
    double max_invariance_residual = 0;
    bool strictly_increasing = false;
};

// sigma_m = m ell / count, m = 1..count.
UnicellularReport unicellular_demo(double ell, int N, int count = 20);

struct CompletenessReport {
    double sum_im_eigs = 0;
    double trace_im_A = 0;
    double slack = 0;
    bool complete = false;
    double departure_from_normality = 0;  // Frobenius norm of the strict Schur upper part
};

CompletenessReport completeness_criterion(const Mat& A, bool require_dissipative = true);

Colligation dissipative_embed(const Mat& A);

}  // namespace livsic
