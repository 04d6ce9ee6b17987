#pragma once

#include <vector>

#include "livsic/colligation.hpp"

namespace livsic {

struct ElementaryFactor {
    cplx lambda;
    Vec eta;  // length r
};

struct BlaschkeProduct {
    Signature J;
    std::vector<ElementaryFactor> factors;  // right-ordered
};

// Schur triangularization of A ordered by (Re, Im) of the eigenvalues;
// eta_k = Phi q_k for the k-th Schur vector.
BlaschkeProduct potapov_factorize(const Colligation& c);

struct ConstraintReport {
    double eta_residual = 0;    // max_k |eta_k* J eta_k - 2 Im lambda_k|
    double gram_residual = 0;   // ||sum eta eta* - Phi Phi*||
    double trace_slack = 0;     // tr(sum eta eta*) - 2 sum |Im lambda_k|
};

ConstraintReport constraint_suite(const BlaschkeProduct& bp, const Mat& Phi);

// I + (i/(z - lambda)) eta eta* J. Throws PoleAt.
Mat eval_factor(const ElementaryFactor& f, const Signature& J, cplx z);

Mat eval_product(const BlaschkeProduct& bp, cplx z);

// S(z) = I + i sum tau_k tau_k* J / (z - lambda_k) for Hermitian A.
class AdditiveCharFn {
public:
    AdditiveCharFn(RVec lambdas, Mat taus, Signature J);
    Mat operator()(cplx z) const;
    const RVec& lambdas() const { return lambdas_; }
    const Mat& taus() const { return taus_; }  // r x n, column k is tau_k
private:
    RVec lambdas_;
    Mat taus_;
    Signature J_;
};

// Throws NotHermitian if ||A - A*|| > 1e-10.
AdditiveCharFn selfadjoint_charfn(const Colligation& c);

}  // namespace livsic
