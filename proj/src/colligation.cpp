#include "livsic/colligation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

namespace livsic {

Signature::Signature(std::vector<int> s) : signs(std::move(s)) {
    for (int v : signs)
        if (v != 1 && v != -1) throw ShapeMismatch("signature entries must be +1 or -1");
}

Mat Signature::matrix() const { return diag().cast<cplx>().asDiagonal(); }

RVec Signature::diag() const {
    RVec d(r());
    for (Eigen::Index i = 0; i < r(); ++i) d(i) = signs[static_cast<std::size_t>(i)];
    return d;
}

Signature Signature::negated() const {
    std::vector<int> s = signs;
    for (int& v : s) v = -v;
    return Signature(std::move(s));
}

Mat apply_J_left(const Signature& J, const Mat& X) {
    Mat Y = X;
    for (Eigen::Index i = 0; i < J.r(); ++i)
        if (J.signs[static_cast<std::size_t>(i)] < 0) Y.row(i) = -Y.row(i);
    return Y;
}

Mat apply_J_right(const Mat& X, const Signature& J) {
    Mat Y = X;
    for (Eigen::Index i = 0; i < J.r(); ++i)
        if (J.signs[static_cast<std::size_t>(i)] < 0) Y.col(i) = -Y.col(i);
    return Y;
}

cplx j_dot(const Signature& J, const Vec& x, const Vec& y) {
    cplx acc = 0;
    for (Eigen::Index i = 0; i < J.r(); ++i)
        acc += static_cast<double>(J.signs[static_cast<std::size_t>(i)]) * std::conj(x(i)) * y(i);
    return acc;
}

Colligation Colligation::empty(const Signature& J) { return {Mat(0, 0), Mat(J.r(), 0), J}; }

SubspaceBasis::SubspaceBasis(Mat cols) : columns(std::move(cols)) {
    const Eigen::Index k = columns.cols();
    if (k > 0 && (columns.adjoint() * columns - Mat::Identity(k, k)).norm() > 1e-10)
        throw ShapeMismatch("subspace basis columns are not orthonormal");
}

SubspaceBasis SubspaceBasis::span_of(const Mat& M, double tol) {
    return SubspaceBasis(orth(M, tol * std::max(1.0, norm2(M))));
}

namespace {

void check_shapes(const Colligation& c) {
    if (c.A.rows() != c.A.cols()) throw ShapeMismatch("A is not square");
    if (c.Phi.rows() != c.r() || c.Phi.cols() != c.n())
        throw ShapeMismatch("Phi must be r x n (got " + std::to_string(c.Phi.rows()) + "x" +
                            std::to_string(c.Phi.cols()) + ")");
}

Mat identity_defect(const Colligation& c) {
    return (c.A - c.A.adjoint()) / I_UNIT - c.Phi.adjoint() * apply_J_left(c.J, c.Phi);
}

// Left singular vectors for the k largest singular values.
Mat leading_left(const Mat& W, Eigen::Index k) {
    if (k == 0) return Mat(W.rows(), 0);
    Eigen::BDCSVD<Mat> svd(W, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(k);
}

}  // namespace

double default_tolerance(const Colligation& c) {
    double p = norm2(c.Phi);
    return 1e-10 * (norm2(c.A) + p * p);
}

ValidationReport validate(const Colligation& c, double tol) {
    check_shapes(c);
    ValidationReport rep;
    RVec d = c.J.diag();
    for (Eigen::Index i = 0; i < d.size(); ++i) rep.signature_residual += std::abs(d(i) * d(i) - 1.0);
    rep.identity_residual = c.n() == 0 ? 0.0 : norm2(identity_defect(c));
    rep.tol = tol;
    rep.pass = rep.identity_residual <= tol && rep.signature_residual == 0.0;
    return rep;
}

ValidationReport validate(const Colligation& c) {
    check_shapes(c);
    return validate(c, default_tolerance(c));
}

Colligation embed(const Mat& A, const std::optional<SubspaceBasis>& channel) {
    if (A.rows() != A.cols()) throw ShapeMismatch("embed: A is not square");
    const Eigen::Index n = A.rows();
    Mat B = re_part((A - A.adjoint()) / I_UNIT);
    HermitianEig e = hermitian_eig(B);
    double scale = std::max(B.norm(), A.norm());
    double cut = 1e-12 * scale;

    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = n - 1; i >= 0; --i)
        if (e.values(i) > cut) pos.push_back(i);
    for (Eigen::Index i = 0; i < n; ++i)
        if (e.values(i) < -cut) neg.push_back(i);

    Mat E0(n, 0);
    if (channel) {
        const Mat& E = channel->columns;
        if (E.rows() != n) throw ShapeMismatch("embed: channel basis has wrong ambient dimension");
        Mat outside = B - E * (E.adjoint() * B);
        if (outside.norm() > 1e-10 * std::max(scale, 1e-300))
            throw ChannelTooSmall("embed: channel does not contain ran(Im A), residual " +
                                  std::to_string(outside.norm()));
        Mat Unz(n, static_cast<Eigen::Index>(pos.size() + neg.size()));
        Eigen::Index col = 0;
        for (auto i : pos) Unz.col(col++) = e.vectors.col(i);
        for (auto i : neg) Unz.col(col++) = e.vectors.col(i);
        Mat rest = E - Unz * (Unz.adjoint() * E);
        Eigen::Index extra = E.cols() - Unz.cols();
        if (extra > 0) E0 = leading_left(rest, extra);
    }

    const Eigen::Index np = static_cast<Eigen::Index>(pos.size());
    const Eigen::Index nn = static_cast<Eigen::Index>(neg.size());
    const Eigen::Index m = E0.cols();
    const Eigen::Index r = np + nn + 2 * m;
    Mat Phi(r, n);
    std::vector<int> signs;
    signs.reserve(static_cast<std::size_t>(r));
    Eigen::Index row = 0;
    for (auto i : pos) {
        Phi.row(row++) = std::sqrt(e.values(i)) * e.vectors.col(i).adjoint();
        signs.push_back(1);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        Phi.row(row++) = E0.col(j).adjoint();
        signs.push_back(1);
    }
    for (auto i : neg) {
        Phi.row(row++) = std::sqrt(-e.values(i)) * e.vectors.col(i).adjoint();
        signs.push_back(-1);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        Phi.row(row++) = E0.col(j).adjoint();
        signs.push_back(-1);
    }
    return {A, Phi, Signature(std::move(signs))};
}

Colligation adjoint(const Colligation& c) { return {c.A.adjoint(), c.Phi, c.J.negated()}; }

Colligation product(const Colligation& c1, const Colligation& c2) {
    check_shapes(c1);
    check_shapes(c2);
    if (c1.J != c2.J) throw ExternalMismatch("product: external signatures differ");
    const Eigen::Index n1 = c1.n(), n2 = c2.n();
    Colligation out;
    out.J = c1.J;
    out.A = Mat::Zero(n1 + n2, n1 + n2);
    out.A.topLeftCorner(n1, n1) = c1.A;
    out.A.bottomRightCorner(n2, n2) = c2.A;
    out.A.topRightCorner(n1, n2) = I_UNIT * (c1.Phi.adjoint() * apply_J_left(c1.J, c2.Phi));
    out.Phi.resize(c1.r(), n1 + n2);
    out.Phi << c1.Phi, c2.Phi;
    return out;
}

Mat resolvent_of_product(const Colligation& c1, const Colligation& c2, cplx z) {
    if (c1.J != c2.J) throw ExternalMismatch("resolvent_of_product: external signatures differ");
    const Eigen::Index n1 = c1.n(), n2 = c2.n();
    Mat R1 = solve(c1.A - z * Mat::Identity(n1, n1), Mat::Identity(n1, n1));
    Mat R2 = solve(c2.A - z * Mat::Identity(n2, n2), Mat::Identity(n2, n2));
    Mat R = Mat::Zero(n1 + n2, n1 + n2);
    R.topLeftCorner(n1, n1) = R1;
    R.bottomRightCorner(n2, n2) = R2;
    R.topRightCorner(n1, n2) = -I_UNIT * (R1 * c1.Phi.adjoint() * apply_J_left(c1.J, c2.Phi) * R2);
    return R;
}

Colligation project(const Colligation& c, const SubspaceBasis& sub) {
    check_shapes(c);
    if (sub.n() != c.n()) throw ShapeMismatch("project: subspace lives in a different space");
    const Mat& V = sub.columns;
    return {V.adjoint() * c.A * V, c.Phi * V, c.J};
}

PrincipalSplit principal_split(const Colligation& c, double tol) {
    check_shapes(c);
    const Eigen::Index n = c.n();
    double sA = norm2(c.A), sPhi = norm2(c.Phi);
    Mat basis(n, 0);
    if (n > 0 && sPhi > 0) {
        Mat block = orth(c.Phi.adjoint(), tol * sPhi);
        basis = block;
        double cut = tol * std::max(sA, sPhi);
        while (basis.cols() < n && block.cols() > 0 && sA > 0) {
            Mat W = c.A * block;
            for (int pass = 0; pass < 2; ++pass) W -= basis * (basis.adjoint() * W);
            Mat fresh = orth(W, cut);
            if (fresh.cols() == 0) break;
            fresh -= basis * (basis.adjoint() * fresh);
            fresh = leading_left(fresh, fresh.cols());
            Eigen::Index room = n - basis.cols();
            if (fresh.cols() > room) fresh = fresh.leftCols(room).eval();
            Mat grown(n, basis.cols() + fresh.cols());
            grown << basis, fresh;
            basis = grown;
            block = fresh;
        }
    }
    PrincipalSplit out;
    out.basis = SubspaceBasis(basis);
    out.complement = SubspaceBasis(orth_complement(basis, n));
    out.principal = project(c, out.basis);
    out.redundant = project(c, out.complement);
    return out;
}

bool is_simple(const Colligation& c, double tol) { return principal_split(c, tol).basis.k() == c.n(); }

ChainFactorization chain_factorization(const Colligation& c, const std::vector<SubspaceBasis>& chain,
                                       double tol) {
    check_shapes(c);
    const Eigen::Index n = c.n();
    std::vector<SubspaceBasis> links = chain;
    if (links.empty() || links.back().k() < n) links.push_back(SubspaceBasis::full(n));
    double scale = std::max(1.0, norm2(c.A));

    ChainFactorization out;
    out.basis = Mat(n, 0);
    Mat prev(n, 0);
    for (std::size_t idx = 0; idx < links.size(); ++idx) {
        const Mat& V = links[idx].columns;
        if (V.rows() != n) throw ShapeMismatch("chain_factorization: subspace has wrong ambient dimension");
        if (V.cols() <= prev.cols())
            throw ConstraintViolation("chain_factorization: chain is not strictly increasing at " +
                                      std::to_string(idx));
        if (prev.cols() > 0 && (prev - V * (V.adjoint() * prev)).norm() > 1e-8)
            throw ConstraintViolation("chain_factorization: chain is not nested at " + std::to_string(idx));
        Mat AV = c.A * V;
        double res = norm2(AV - V * (V.adjoint() * AV));
        if (res > tol * scale) throw NotInvariant(idx, res);
        Mat D = leading_left(V - prev * (prev.adjoint() * V), V.cols() - prev.cols());
        out.factors.push_back(project(c, SubspaceBasis(D)));
        Mat grown(n, out.basis.cols() + D.cols());
        grown << out.basis, D;
        out.basis = grown;
        prev = V;
    }
    return out;
}

namespace {

Mat krylov_frame(const Colligation& c, int depth, double s) {
    const Eigen::Index n = c.n(), r = c.r();
    Mat K(n, r * depth);
    Mat block = c.Phi.adjoint();
    for (int k = 0; k < depth; ++k) {
        K.middleCols(k * r, r) = block;
        block = (c.A * block) / s;
    }
    return K;
}

}  // namespace

EquivalenceResult unitary_equivalence(const Colligation& c1, const Colligation& c2, int depth, double tol) {
    check_shapes(c1);
    check_shapes(c2);
    if (c1.J != c2.J) throw ExternalMismatch("unitary_equivalence: external signatures differ");
    EquivalenceResult out;
    if (c1.n() != c2.n()) {
        out.gram_residual = std::numeric_limits<double>::infinity();
        return out;
    }
    if (!is_simple(c1) || !is_simple(c2)) throw NotSimple("unitary_equivalence: colligation is not simple");
    if (depth <= 0) depth = static_cast<int>(c1.n() + c2.n());
    double s = std::max({norm2(c1.A), norm2(c2.A), 1.0});
    Mat K1 = krylov_frame(c1, depth, s);
    Mat K2 = krylov_frame(c2, depth, s);
    Mat G1 = K1.adjoint() * K1;
    Mat G2 = K2.adjoint() * K2;
    out.gram_residual = norm2(G1 - G2) / std::max(1.0, norm2(G1));
    if (out.gram_residual > tol) return out;

    Eigen::BDCSVD<Mat> svd(K2 * K1.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat U = svd.matrixU() * svd.matrixV().adjoint();
    double scale = std::max({1.0, norm2(c1.A), norm2(c1.Phi)});
    out.residual = std::max(norm2(U * c1.A - c2.A * U), norm2(c1.Phi - c2.Phi * U)) / scale;
    if (out.residual <= 10 * tol) out.U = U;
    return out;
}

}  // namespace livsic
