#include "livsic/charfn.hpp"

#include <cmath>

namespace livsic {

namespace {

Mat shifted(const Mat& A, cplx z) { return A - z * Mat::Identity(A.rows(), A.cols()); }

}  // namespace

CharFnSample eval_S(const Colligation& c, cplx z) {
    const Eigen::Index r = c.r();
    CharFnSample out{z, Mat::Identity(r, r), true};
    if (c.n() == 0) return out;
    try {
        Mat X = solve(shifted(c.A, z), apply_J_right(c.Phi.adjoint(), c.J));
        out.S -= I_UNIT * (c.Phi * X);
    } catch (const Singular&) {
        out.regular = false;
    }
    return out;
}

Mat eval_Q(const Colligation& c, cplx z) {
    if (c.n() == 0) return Mat(0, c.r());
    return solve(shifted(c.A, z), apply_J_right(c.Phi.adjoint(), c.J));
}

Mat eval_V(const Colligation& c, cplx z) {
    const Eigen::Index r = c.r();
    if (c.n() == 0) return Mat::Zero(r, r);
    Mat X = solve(shifted(re_part(c.A), z), c.Phi.adjoint());
    return 0.5 * (c.Phi * X);
}

Mat cayley(const Mat& X, const Signature& J, CayleyDir dir) {
    const Eigen::Index r = X.rows();
    Mat Id = Mat::Identity(r, r);
    if (dir == CayleyDir::SToV) {
        // i (S - I)(S + I)^{-1} J, computed as a right solve
        Mat Y = solve((X + Id).transpose(), (X - Id).transpose()).transpose();
        return apply_J_right(I_UNIT * Y, J);
    }
    Mat VJ = apply_J_right(X, J);
    return solve((Id + I_UNIT * VJ).transpose(), (Id - I_UNIT * VJ).transpose()).transpose();
}

Mat cayley_left(const Mat& X, const Signature& J, CayleyDir dir) {
    const Eigen::Index r = X.rows();
    Mat Id = Mat::Identity(r, r);
    if (dir == CayleyDir::SToV) return apply_J_right(I_UNIT * solve(X + Id, X - Id), J);
    Mat VJ = apply_J_right(X, J);
    return solve(Id + I_UNIT * VJ, Id - I_UNIT * VJ);
}

Mat j_form(const Mat& S, const Signature& J) { return S.adjoint() * apply_J_left(J, S) - J.matrix(); }

Mat j_form_dual(const Mat& S, const Signature& J) {
    return apply_J_right(S, J) * S.adjoint() - J.matrix();
}

JClass classify(const Mat& F, double tol) {
    if (F.rows() == 0) return JClass::Unitary;
    Eigen::SelfAdjointEigenSolver<Mat> es(re_part(F), Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(F.rows() - 1);
    bool nonneg = lo >= -tol, nonpos = hi <= tol;
    if (nonneg && nonpos) return JClass::Unitary;
    if (nonneg) return JClass::Expansive;
    if (nonpos) return JClass::Contractive;
    return JClass::Indefinite;
}

const char* to_string(JClass k) {
    switch (k) {
        case JClass::Expansive: return "J-expansive";
        case JClass::Unitary: return "J-unitary";
        case JClass::Contractive: return "J-contractive";
        case JClass::Indefinite: return "indefinite";
    }
    return "?";
}

double j_identity_residual(const Colligation& c, cplx z) {
    CharFnSample s = eval_S(c, z);
    if (!s.regular) throw Singular("j_identity_residual: z is in the spectrum");
    Mat Q = eval_Q(c, z);
    cplx w = (z - std::conj(z)) / I_UNIT;
    return norm2(j_form(s.S, c.J) - w * (Q.adjoint() * Q));
}

Mat potapov_ginzburg(const Mat& S0, const Signature& J) {
    const Eigen::Index r = J.r();
    if (S0.rows() != r || S0.cols() != r) throw ShapeMismatch("potapov_ginzburg: S0 must be r x r");
    double m = min_eig(J.matrix() - S0.adjoint() * apply_J_left(J, S0));
    if (m < -1e-10) throw NotJContractive("potapov_ginzburg: smallest eigenvalue " + std::to_string(m));
    Mat P = Mat::Zero(r, r), Q = Mat::Zero(r, r);
    for (Eigen::Index i = 0; i < r; ++i) (J.signs[static_cast<std::size_t>(i)] > 0 ? P : Q)(i, i) = 1.0;
    return solve(P - S0 * Q, S0 * P - Q);
}

MobiusCharFn::MobiusCharFn(cplx a) : a_(a) {
    if (a.imag() == 0.0) throw HypothesisViolated("mobius_charfn: Im a must be nonzero");
}

cplx MobiusCharFn::operator()(cplx z) const {
    if (std::abs(z - a_) <= 1e-14 * std::max(1.0, std::abs(a_))) throw PoleAt(a_);
    return (z - std::conj(a_)) / (z - a_);
}

Colligation MobiusCharFn::colligation() const {
    Mat A(1, 1), Phi(1, 1);
    A(0, 0) = a_;
    Phi(0, 0) = std::sqrt(2.0 * std::abs(a_.imag()));
    return {A, Phi, Signature({a_.imag() > 0 ? 1 : -1})};
}

MobiusCharFn mobius_charfn(cplx a) { return MobiusCharFn(a); }

OpenSystemTrace simulate_open_system(const Colligation& c, const InputSignal& input, const Vec& h0,
                                     double step, double T) {
    if (!(step > 0)) throw HypothesisViolated("simulate_open_system: step must be positive");
    if (h0.size() != c.n()) throw ShapeMismatch("simulate_open_system: h0 has wrong dimension");
    const Mat PhiJ = apply_J_right(c.Phi.adjoint(), c.J);
    // dh/dt = i A h - i Phi* J phi-
    auto rhs = [&](double t, const Vec& h) -> Vec {
        return I_UNIT * (c.A * h - PhiJ * input(t));
    };
    auto record = [&](OpenSystemTrace& tr, double t, const Vec& h) {
        Vec in = input(t);
        Vec out = in - I_UNIT * (c.Phi * h);
        tr.t.push_back(t);
        tr.input.push_back(in);
        tr.state.push_back(h);
        tr.output.push_back(out);
        tr.energy.push_back(h.squaredNorm());
        double fin = j_dot(c.J, in, in).real();
        double fout = j_dot(c.J, out, out).real();
        tr.flux.push_back(fin - fout);
    };

    const long steps = std::max(1L, std::lround(T / step));
    const double dt = T / static_cast<double>(steps);
    OpenSystemTrace tr;
    Vec h = h0;
    record(tr, 0.0, h);
    for (long k = 0; k < steps; ++k) {
        double t = k * dt;
        Vec k1 = rhs(t, h);
        Vec k2 = rhs(t + 0.5 * dt, h + 0.5 * dt * k1);
        Vec k3 = rhs(t + 0.5 * dt, h + 0.5 * dt * k2);
        Vec k4 = rhs(t + dt, h + dt * k3);
        h += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        record(tr, (k + 1) * dt, h);
    }

    // Trapezoid with the Hermite end-slope correction on each step; slopes of
    // the flux come from second-order differences of the samples.
    const std::vector<double>& f = tr.flux;
    const std::size_t N = f.size() - 1;
    std::vector<double> slope(N + 1, 0.0);
    if (N >= 2) {
        slope[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dt);
        slope[N] = (3 * f[N] - 4 * f[N - 1] + f[N - 2]) / (2 * dt);
        for (std::size_t j = 1; j < N; ++j) slope[j] = (f[j + 1] - f[j - 1]) / (2 * dt);
    }
    double total = 0;
    for (std::size_t j = 0; j < N; ++j) {
        double quad = 0.5 * dt * (f[j] + f[j + 1]) + dt * dt / 12.0 * (slope[j] - slope[j + 1]);
        double res = tr.energy[j + 1] - tr.energy[j] - quad;
        tr.step_residual.push_back(res);
        total += res;
    }
    tr.drift = std::abs(total);
    return tr;
}

}  // namespace livsic
