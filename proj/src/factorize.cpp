#include "livsic/factorize.hpp"

#include <cmath>
#include <limits>

namespace livsic {

BlaschkeProduct potapov_factorize(const Colligation& c) {
    validate(c, std::numeric_limits<double>::infinity());  // shape check only
    BlaschkeProduct bp{c.J, {}};
    if (c.n() == 0) return bp;
    SchurResult s = schur(c.A, SchurOrder::RealThenImag);
    Mat eta = c.Phi * s.Q;
    bp.factors.reserve(static_cast<std::size_t>(c.n()));
    for (Eigen::Index k = 0; k < c.n(); ++k) bp.factors.push_back({s.T(k, k), eta.col(k)});
    return bp;
}

ConstraintReport constraint_suite(const BlaschkeProduct& bp, const Mat& Phi) {
    ConstraintReport rep;
    const Eigen::Index r = bp.J.r();
    Mat G = Mat::Zero(r, r);
    double imsum = 0;
    for (const auto& f : bp.factors) {
        double q = j_dot(bp.J, f.eta, f.eta).real();
        rep.eta_residual = std::max(rep.eta_residual, std::abs(q - 2.0 * f.lambda.imag()));
        G += f.eta * f.eta.adjoint();
        imsum += std::abs(f.lambda.imag());
    }
    rep.gram_residual = norm2(G - Phi * Phi.adjoint());
    rep.trace_slack = G.trace().real() - 2.0 * imsum;
    return rep;
}

Mat eval_factor(const ElementaryFactor& f, const Signature& J, cplx z) {
    const Eigen::Index r = J.r();
    Mat F = Mat::Identity(r, r);
    if (f.eta.squaredNorm() == 0.0) return F;
    if (std::abs(z - f.lambda) <= 1e-14 * std::max(1.0, std::abs(f.lambda))) throw PoleAt(f.lambda);
    F += (I_UNIT / (z - f.lambda)) * (f.eta * apply_J_right(f.eta.adjoint(), J));
    return F;
}

Mat eval_product(const BlaschkeProduct& bp, cplx z) {
    const Eigen::Index r = bp.J.r();
    Mat S = Mat::Identity(r, r);
    for (const auto& f : bp.factors) S = S * eval_factor(f, bp.J, z);
    return S;
}

AdditiveCharFn::AdditiveCharFn(RVec lambdas, Mat taus, Signature J)
    : lambdas_(std::move(lambdas)), taus_(std::move(taus)), J_(std::move(J)) {}

Mat AdditiveCharFn::operator()(cplx z) const {
    const Eigen::Index r = J_.r();
    Mat S = Mat::Identity(r, r);
    for (Eigen::Index k = 0; k < lambdas_.size(); ++k) {
        if (std::abs(z - lambdas_(k)) <= 1e-14 * std::max(1.0, std::abs(lambdas_(k))))
            throw PoleAt(lambdas_(k));
        S += (I_UNIT / (z - lambdas_(k))) * (taus_.col(k) * apply_J_right(taus_.col(k).adjoint(), J_));
    }
    return S;
}

AdditiveCharFn selfadjoint_charfn(const Colligation& c) {
    if (norm2(c.A - c.A.adjoint()) > 1e-10) throw NotHermitian("selfadjoint_charfn: A is not Hermitian");
    HermitianEig e = hermitian_eig(re_part(c.A));
    return AdditiveCharFn(e.values, c.Phi * e.vectors, c.J);
}

}  // namespace livsic
