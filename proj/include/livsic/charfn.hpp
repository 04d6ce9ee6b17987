#pragma once

#include <functional>
#include <vector>

#include "livsic/colligation.hpp"

namespace livsic {

struct CharFnSample {
    cplx z;
    Mat S;         // r x r; identity-sized but meaningless when !regular
    bool regular;  // false when z is numerically in the spectrum of A
};

// S(z) = I - i Phi (A - zI)^{-1} Phi* J
CharFnSample eval_S(const Colligation& c, cplx z);

// Q(z) = (A - zI)^{-1} Phi* J. Throws Singular.
Mat eval_Q(const Colligation& c, cplx z);

// V(z) = 1/2 Phi (Re A - zI)^{-1} Phi*. Throws Singular.
Mat eval_V(const Colligation& c, cplx z);

enum class CayleyDir { SToV, VToS };

// S -> V: i (S - I)(S + I)^{-1} J.   V -> S: (I - iVJ)(I + iVJ)^{-1}.
Mat cayley(const Mat& X, const Signature& J, CayleyDir dir);

// The same maps written with the inverse on the other side.
Mat cayley_left(const Mat& X, const Signature& J, CayleyDir dir);

// S* J S - J
Mat j_form(const Mat& S, const Signature& J);
// S J S* - J
Mat j_form_dual(const Mat& S, const Signature& J);

enum class JClass { Expansive, Unitary, Contractive, Indefinite };

// Classifies a Hermitian form by the sign of its spectrum; eigenvalues
// within tol of zero count as zero.
JClass classify(const Mat& F, double tol);
const char* to_string(JClass k);

// ||S*JS - J - ((z - conj z)/i) Q* Q||
double j_identity_residual(const Colligation& c, cplx z);

// W = (P - S0 Q)^{-1} (S0 P - Q), P and Q the spectral projections of J.
Mat potapov_ginzburg(const Mat& S0, const Signature& J);

class MobiusCharFn {
public:
    explicit MobiusCharFn(cplx a);
    cplx operator()(cplx z) const;
    cplx point() const { return a_; }
    Colligation colligation() const;  // the 1x1 colligation whose S is theta_a
private:
    cplx a_;
};

// theta_a(z) = (z - conj a)/(z - a)
MobiusCharFn mobius_charfn(cplx a);

struct OpenSystemTrace {
    std::vector<double> t;
    std::vector<Vec> input;   // phi-
    std::vector<Vec> state;   // h
    std::vector<Vec> output;  // phi+
    std::vector<double> energy;     // <h, h>
    std::vector<double> flux;       // <J phi-, phi-> - <J phi+, phi+>
    std::vector<double> step_residual;  // per step: energy change minus the flux quadrature
    double drift = 0;                   // |sum of step residuals| = |E(T) - E(0) - integral of flux|
};

using InputSignal = std::function<Vec(double)>;

// Integrates i dh/dt + A h = Phi* J phi-(t), phi+ = phi- - i Phi h with the
// classical fourth-order Runge-Kutta method.
OpenSystemTrace simulate_open_system(const Colligation& c, const InputSignal& input, const Vec& h0,
                                     double step, double T);

}  // namespace livsic
