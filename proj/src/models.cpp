#include "livsic/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "livsic/charfn.hpp"
#include "livsic/multint.hpp"

namespace livsic {

DiscreteModelData discrete_data(const BlaschkeProduct& bp) {
    DiscreteModelData d;
    for (const auto& f : bp.factors) {
        d.lambdas.push_back(f.lambda);
        d.etas.push_back(f.eta);
    }
    return d;
}

Eigen::Index rank_parameter(const std::vector<Mat>& xi) {
    Eigen::Index p = 0;
    for (const auto& x : xi) {
        if (x.size() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Mat> es(x * x.adjoint(), Eigen::EigenvaluesOnly);
        Eigen::Index k = (es.eigenvalues().array() > 1e-10).count();
        p = std::max(p, k);
    }
    return p;
}

ContinuousModelData ContinuousModelData::sample(double ell, const std::function<double(double)>& a,
                                                const std::function<Mat(double)>& xi, int samples) {
    if (!(ell > 0) || samples < 2) throw ShapeMismatch("ContinuousModelData: need ell > 0 and two samples");
    ContinuousModelData d;
    d.ell = ell;
    for (int k = 0; k < samples; ++k) {
        double t = ell * k / (samples - 1);
        d.t.push_back(t);
        d.a.push_back(a(t));
        d.xi.push_back(xi(t));
    }
    d.p = rank_parameter(d.xi);
    return d;
}

ContinuousModelData ContinuousModelData::from_density(double ell, const std::function<double(double)>& a,
                                                      const std::function<Mat(double)>& E, int samples) {
    std::vector<HermitianEig> eigs;
    Eigen::Index p = 0;
    for (int k = 0; k < samples; ++k) {
        eigs.push_back(hermitian_eig(E(ell * k / (samples - 1))));
        p = std::max(p, static_cast<Eigen::Index>((eigs.back().values.array() > 1e-10).count()));
    }
    std::size_t idx = 0;
    auto xi = [&](double) {
        const HermitianEig& e = eigs[idx++];
        const Eigen::Index r = e.values.size();
        Mat x = Mat::Zero(r, std::max<Eigen::Index>(p, 1));
        Eigen::Index col = 0;
        for (Eigen::Index i = r - 1; i >= 0 && col < p; --i, ++col)
            if (e.values(i) > 1e-10) x.col(col) = std::sqrt(e.values(i)) * e.vectors.col(i);
        return x;
    };
    return sample(ell, a, xi, samples);
}

namespace {

std::pair<std::size_t, double> locate(const std::vector<double>& t, double x) {
    if (x <= t.front()) return {0, 0.0};
    if (x >= t.back()) return {t.size() - 2, 1.0};
    auto it = std::upper_bound(t.begin(), t.end(), x);
    std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
    return {k, (x - t[k]) / (t[k + 1] - t[k])};
}

void check_continuous(const ContinuousModelData& d, const Signature& J) {
    if (!(d.ell > 0)) throw ConstraintViolation("continuous model: ell must be positive");
    if (d.t.size() < 2 || d.a.size() != d.t.size() || d.xi.size() != d.t.size())
        throw ShapeMismatch("continuous model: samples of t, a and xi must match (at least two)");
    for (std::size_t k = 1; k < d.t.size(); ++k) {
        if (!(d.t[k] > d.t[k - 1])) throw ShapeMismatch("continuous model: t must be strictly increasing");
        if (d.a[k] < d.a[k - 1])
            throw NotNondecreasing("a(t) decreases between t=" + std::to_string(d.t[k - 1]) +
                                   " and t=" + std::to_string(d.t[k]));
    }
    for (std::size_t k = 0; k < d.xi.size(); ++k) {
        const Mat& x = d.xi[k];
        if (x.rows() != J.r() || x.cols() != d.width())
            throw ShapeMismatch("continuous model: xi must be r x q at every sample");
        double tr = x.squaredNorm();
        if (tr > 1e-24 && std::abs(tr - 1.0) > 1e-8)
            throw ConstraintViolation("continuous model: tr(xi xi*) = " + std::to_string(tr) +
                                      " at t=" + std::to_string(d.t[k]));
    }
    if (d.p > J.r()) throw ConstraintViolation("continuous model: p exceeds r");
}

void check_discrete(const DiscreteModelData& d, const Signature& J) {
    if (d.lambdas.size() != d.etas.size()) throw ShapeMismatch("discrete model: lambdas and etas differ in count");
    for (std::size_t k = 0; k < d.size(); ++k) {
        const Vec& eta = d.etas[k];
        if (eta.size() != J.r()) throw ShapeMismatch("discrete model: eta_" + std::to_string(k) + " has wrong size");
        double q = j_dot(J, eta, eta).real();
        double want = 2.0 * d.lambdas[k].imag();
        if (std::abs(q - want) > 1e-9 * std::max(1.0, eta.squaredNorm()))
            throw ConstraintViolation("discrete model: eta_" + std::to_string(k) + "* J eta_" + std::to_string(k) +
                                      " = " + std::to_string(q) + " but 2 Im lambda = " + std::to_string(want));
    }
}

DiscreteModelData truncated(const DiscreteModelData& d, std::size_t K) {
    if (K >= d.size()) return d;
    DiscreteModelData out;
    out.lambdas.assign(d.lambdas.begin(), d.lambdas.begin() + static_cast<long>(K));
    out.etas.assign(d.etas.begin(), d.etas.begin() + static_cast<long>(K));
    return out;
}

struct Cells {
    double delta;
    std::vector<double> a;
    std::vector<Mat> Phi;  // r x q blocks, sqrt(delta) xi(x_j)
};

Cells make_cells(const ContinuousModelData& cmd, int N) {
    Cells c;
    c.delta = cmd.ell / N;
    for (int j = 0; j < N; ++j) {
        double x = (j + 0.5) * c.delta;
        c.a.push_back(cmd.a_at(x));
        c.Phi.push_back(std::sqrt(c.delta) * cmd.xi_at(x));
    }
    return c;
}

}  // namespace

double ContinuousModelData::a_at(double x) const {
    auto [k, u] = locate(t, x);
    return (1.0 - u) * a[k] + u * a[k + 1];
}

Mat ContinuousModelData::xi_at(double x) const {
    auto [k, u] = locate(t, x);
    return (1.0 - u) * xi[k] + u * xi[k + 1];
}

ContinuousModelData integration_operator_data(double ell) {
    return ContinuousModelData::sample(ell, [](double) { return 0.0; }, [](double) { return Mat::Ones(1, 1); },
                                       2);
}

double truncation_tail(const DiscreteModelData& d, std::size_t K) {
    if (K >= d.size()) return 0.0;
    const Eigen::Index r = d.etas.front().size();
    Mat G = Mat::Zero(r, r);
    for (std::size_t k = K; k < d.size(); ++k) G += d.etas[k] * d.etas[k].adjoint();
    return norm2(G);
}

Colligation build_discrete_model(const DiscreteModelData& d, const Signature& J) {
    check_discrete(d, J);
    const Eigen::Index n = static_cast<Eigen::Index>(d.size());
    Colligation c{Mat::Zero(n, n), Mat(J.r(), n), J};
    for (Eigen::Index k = 0; k < n; ++k) c.Phi.col(k) = d.etas[static_cast<std::size_t>(k)];
    Mat G = c.Phi.adjoint() * apply_J_left(J, c.Phi);
    for (Eigen::Index k = 0; k < n; ++k) {
        c.A(k, k) = d.lambdas[static_cast<std::size_t>(k)];
        for (Eigen::Index l = k + 1; l < n; ++l) c.A(k, l) = I_UNIT * G(k, l);
    }
    return c;
}

Colligation build_continuous_model(const ContinuousModelData& cmd, const Signature& J, int N) {
    check_continuous(cmd, J);
    if (N < 1) throw ShapeMismatch("build_continuous_model: need N >= 1");
    const Eigen::Index q = cmd.width();
    Cells cells = make_cells(cmd, N);
    const Eigen::Index n = N * q;
    Colligation c{Mat::Zero(n, n), Mat(J.r(), n), J};
    for (int j = 0; j < N; ++j) c.Phi.middleCols(j * q, q) = cells.Phi[static_cast<std::size_t>(j)];
    Mat G = c.Phi.adjoint() * apply_J_left(J, c.Phi);
    for (int j = 0; j < N; ++j) {
        auto blk = c.A.block(j * q, j * q, q, q);
        blk = (0.5 * I_UNIT) * G.block(j * q, j * q, q, q);
        blk.diagonal().array() += cells.a[static_cast<std::size_t>(j)];
        c.A.block(j * q, (j + 1) * q, q, n - (j + 1) * q) = I_UNIT * G.block(j * q, (j + 1) * q, q, n - (j + 1) * q);
    }
    return c;
}

Colligation build_combined_model(const CombinedModel& cm, const Signature& J) {
    Colligation disc = build_discrete_model(truncated(cm.discrete, cm.K), J);
    if (!cm.continuous || cm.N == 0) return disc;
    Colligation cont = build_continuous_model(*cm.continuous, J, cm.N);
    const Eigen::Index n1 = disc.n(), n2 = cont.n();
    Colligation c{Mat::Zero(n1 + n2, n1 + n2), Mat(J.r(), n1 + n2), J};
    c.A.topLeftCorner(n1, n1) = disc.A;
    c.A.bottomRightCorner(n2, n2) = cont.A;
    c.A.topRightCorner(n1, n2) = I_UNIT * (disc.Phi.adjoint() * apply_J_left(J, cont.Phi));
    c.Phi << disc.Phi, cont.Phi;
    return c;
}

Mat model_charfn(const CombinedModel& cm, const Signature& J, cplx z) {
    DiscreteModelData d = truncated(cm.discrete, cm.K);
    check_discrete(d, J);
    const Eigen::Index r = J.r();
    Mat S = Mat::Identity(r, r);
    for (std::size_t k = 0; k < d.size(); ++k) S = S * eval_factor({d.lambdas[k], d.etas[k]}, J, z);
    if (!cm.continuous || cm.N == 0) return S;
    const ContinuousModelData& cmd = *cm.continuous;
    check_continuous(cmd, J);
    Cells cells = make_cells(cmd, cm.N);
    for (int j = 0; j < cm.N; ++j) {
        const Mat& P = cells.Phi[static_cast<std::size_t>(j)];
        Mat Ajj = (0.5 * I_UNIT) * (P.adjoint() * apply_J_left(J, P));
        Ajj.diagonal().array() += cells.a[static_cast<std::size_t>(j)] - z;
        Mat X = solve(Ajj, apply_J_right(P.adjoint(), J));
        S = S * (Mat::Identity(r, r) - I_UNIT * (P * X));
    }
    return S;
}

Mat continuous_charfn_ode(const ContinuousModelData& cmd, const Signature& J, cplx z, double tol) {
    check_continuous(cmd, J);
    MatFn M = [&](double t) -> Mat {
        Mat x = cmd.xi_at(t);
        return (I_UNIT / (z - cmd.a_at(t))) * apply_J_right(x * x.adjoint(), J);
    };
    return multint_lebesgue(M, 0.0, cmd.ell, LebesgueMethod::Ode, tol, J.r()).value;
}

Colligation spectral_model(const Colligation& c) {
    validate(c, std::numeric_limits<double>::infinity());
    const Eigen::Index n = c.n(), r = c.r();
    if (n == 0) return c;
    HermitianEig e = hermitian_eig(re_part(c.A));
    double gap = 1e-9 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
    double cut = 1e-9 * std::max(1.0, norm2(c.Phi));

    std::vector<double> points;
    std::vector<Mat> L;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && e.values(stop) - e.values(stop - 1) <= gap) ++stop;
        Mat sig = c.Phi * e.vectors.middleCols(start, stop - start);  // r x k, sig sig* = 2 sigma_j
        if (sig.size() > 0) {
            Eigen::BDCSVD<Mat> svd(sig, Eigen::ComputeThinU);
            const RVec& s = svd.singularValues();
            Eigen::Index k = (s.array() > cut).count();
            if (k > 0) {
                L.push_back(svd.matrixU().leftCols(k) * s.head(k).cast<cplx>().asDiagonal());
                points.push_back(e.values.segment(start, stop - start).mean());
            }
        }
        start = stop;
    }
    Eigen::Index m = 0;
    for (const auto& l : L) m += l.cols();
    Mat Phi(r, m);
    Mat A = Mat::Zero(m, m);
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < L.size(); ++j) {
        Phi.middleCols(col, L[j].cols()) = L[j];
        for (Eigen::Index i = 0; i < L[j].cols(); ++i) A(col + i, col + i) = points[j];
        col += L[j].cols();
    }
    A += (0.5 * I_UNIT) * (Phi.adjoint() * apply_J_left(c.J, Phi));
    return {A, Phi, c.J};
}

RedundantPart model_redundant_part(const CombinedModel& cm, const Signature& J, double tol) {
    Colligation c = build_combined_model(cm, J);
    PrincipalSplit ps = principal_split(c, tol);
    RedundantPart out;
    out.basis = ps.complement;
    out.discrete_dim = static_cast<Eigen::Index>(std::min(cm.K, cm.discrete.size()));
    if (out.basis.k() > 0 && out.discrete_dim > 0)
        out.discrete_leak = out.basis.columns.topRows(out.discrete_dim).cwiseAbs().maxCoeff();
    return out;
}

UnicellularReport unicellular_demo(double ell, int N, int count) {
    if (N < 2) throw ShapeMismatch("unicellular_demo: need N >= 2");
    Colligation c = build_continuous_model(integration_operator_data(ell), Signature::plus(1), N);
    const double delta = ell / N;
    UnicellularReport rep;
    for (int m = 1; m <= count; ++m) {
        double sigma = ell * m / count;
        Eigen::Index k = 0;
        while (k < N && (k + 0.5) * delta < sigma) ++k;
        Mat V = Mat::Identity(N, N).leftCols(k);
        Mat AV = c.A * V;
        double res = k == 0 ? 0.0 : norm2(AV - V * (V.adjoint() * AV));
        Colligation part = project(c, SubspaceBasis(V));
        CharFnSample s = eval_S(part, I_UNIT);
        rep.entries.push_back({sigma, k, res, s.S(0, 0)});
        rep.max_invariance_residual = std::max(rep.max_invariance_residual, res);
    }
    rep.strictly_increasing = true;
    for (std::size_t j = 1; j < rep.entries.size(); ++j)
        if (!(std::abs(rep.entries[j].S_at_i) > std::abs(rep.entries[j - 1].S_at_i))) rep.strictly_increasing = false;
    return rep;
}

namespace {

void require_dissipative(const Mat& A, const char* who) {
    double m = min_eig(im_part(A));
    if (m < -1e-10 * std::max(1.0, norm2(A)))
        throw NotDissipative(std::string(who) + ": Im A has eigenvalue " + std::to_string(m));
}

}  // namespace

CompletenessReport completeness_criterion(const Mat& A, bool check) {
    if (A.rows() != A.cols()) throw ShapeMismatch("completeness_criterion: A is not square");
    if (check) require_dissipative(A, "completeness_criterion");
    CompletenessReport rep;
    if (A.rows() == 0) {
        rep.complete = true;
        return rep;
    }
    SchurResult s = schur(A);
    for (Eigen::Index k = 0; k < A.rows(); ++k) rep.sum_im_eigs += s.T(k, k).imag();
    rep.trace_im_A = im_part(A).trace().real();
    rep.slack = rep.trace_im_A - rep.sum_im_eigs;
    rep.complete = rep.slack <= 1e-8;
    Mat strict = s.T.triangularView<Eigen::StrictlyUpper>();
    rep.departure_from_normality = strict.norm();
    return rep;
}

Colligation dissipative_embed(const Mat& A) {
    if (A.rows() != A.cols()) throw ShapeMismatch("dissipative_embed: A is not square");
    require_dissipative(A, "dissipative_embed");
    const Eigen::Index n = A.rows();
    Mat B = re_part((A - A.adjoint()) / I_UNIT);
    HermitianEig e = hermitian_eig(B);
    double cut = 1e-12 * std::max(B.norm(), A.norm());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = n - 1; i >= 0; --i)
        if (e.values(i) > cut) keep.push_back(i);
    const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
    Mat Phi(r, n);
    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index i = keep[static_cast<std::size_t>(j)];
        Phi.row(j) = std::sqrt(e.values(i)) * e.vectors.col(i).adjoint();
    }
    return {A, Phi, Signature::plus(static_cast<std::size_t>(r))};
}

}  // namespace livsic
