#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "livsic/charfn.hpp"
#include "livsic/colligation.hpp"
#include "support.hpp"

using namespace livsic;
using namespace livsic::testing;

namespace {

Mat m1(cplx v) {
    Mat M(1, 1);
    M(0, 0) = v;
    return M;
}

Colligation scalar(cplx a, double phi, int sign = 1) { return {m1(a), m1(phi), Signature({sign})}; }

const cplx i1{0, 1};

Eigen::Index rank_of(const Mat& M) { return orth(M, 1e-8).cols(); }

}  // namespace

TEST_CASE("validate examples") {
    std::mt19937_64 rng(1);
    Colligation closed{random_hermitian(3, rng), Mat(0, 3), Signature()};
    auto rep = validate(closed, 1e-10);
    CHECK(rep.identity_residual < 1e-15);
    CHECK(rep.pass);

    // (A - A*)/i = 2 = Phi* J Phi
    rep = validate(scalar(i1, std::sqrt(2.0)), 1e-10);
    CHECK(rep.identity_residual < 1e-15);
    CHECK(rep.pass);

    rep = validate(scalar(i1, 1.0), 1e-10);
    CHECK(rep.identity_residual == doctest::Approx(1.0));
    CHECK_FALSE(rep.pass);

    Colligation bad{Mat::Zero(2, 2), Mat::Zero(1, 3), Signature({1})};
    CHECK_THROWS_AS(validate(bad, 1.0), ShapeMismatch);
    CHECK_THROWS_AS(Signature({1, 0}), ShapeMismatch);
}

TEST_CASE("embed: Hermitian input gives a closed system") {
    std::mt19937_64 rng(2);
    Colligation c = embed(random_hermitian(4, rng));
    CHECK(c.r() == 0);
    CHECK(c.Phi.rows() == 0);
    CHECK(validate(c).pass);
}

TEST_CASE("embed: Jordan block") {
    Mat A(2, 2);
    A << 0, 1, 0, 0;
    Colligation c = embed(A);
    REQUIRE(c.r() == 2);
    CHECK(c.J.signs == std::vector<int>{1, -1});
    // 2 Im A has eigenvalues +1 and -1, so |B|^{1/2} = I and Phi is unitary
    CHECK(norm2(c.Phi.adjoint() * c.Phi - Mat::Identity(2, 2)) < 1e-12);
    Mat B = (A - A.adjoint()) / i1;
    CHECK(norm2(c.Phi.adjoint() * c.J.matrix() * c.Phi - B) <= 1e-12);
}

TEST_CASE("embed: dissipative scalar") {
    Colligation c = embed(m1(i1));
    REQUIRE(c.r() == 1);
    CHECK(c.J.signs[0] == 1);
    CHECK(std::abs(c.Phi(0, 0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("embed with a larger channel") {
    std::mt19937_64 rng(3);
    Mat K = random_matrix(5, 2, rng);
    Mat A = random_hermitian(5, rng) + i1 * (K * K.adjoint());  // rank Im A = 2
    Colligation c = embed(A, SubspaceBasis::full(5));
    CHECK(c.r() == 2 + 2 * 3);
    CHECK(validate(c).pass);
    int plus = static_cast<int>(std::count(c.J.signs.begin(), c.J.signs.end(), 1));
    CHECK(plus == 5);
    // +1 entries come first
    CHECK(std::is_sorted(c.J.signs.rbegin(), c.J.signs.rend()));

    Mat E = orth(K, 1e-12);
    CHECK(embed(A, SubspaceBasis(E)).r() == 2);
    Mat wrong = orth_complement(E, 5).leftCols(2);
    CHECK_THROWS_AS(embed(A, SubspaceBasis(wrong)), ChannelTooSmall);
}

TEST_CASE("embed on random matrices passes validate") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::Index n = 1 + trial % 10;
        Colligation c = embed(random_matrix(n, n, rng));
        CHECK(validate(c).pass);
        CHECK(c.r() <= n);
    }
}

TEST_CASE("adjoint") {
    std::mt19937_64 rng(5);
    Colligation closed{random_hermitian(3, rng), Mat::Zero(2, 3), Signature({1, -1})};
    Colligation ad = adjoint(closed);
    CHECK(ad.A == closed.A);
    CHECK(ad.J.signs == std::vector<int>{-1, 1});

    Colligation a = adjoint(scalar(i1, std::sqrt(2.0)));
    CHECK(a.A(0, 0) == -i1);
    CHECK(a.J.signs[0] == -1);
    CHECK(validate(a).pass);

    Colligation c = random_colligation(4, Signature({1, -1}), rng);
    Colligation back = adjoint(adjoint(c));
    CHECK(back.A == c.A);
    CHECK(back.Phi == c.Phi);
    CHECK(back.J == c.J);
}

TEST_CASE("product blocks") {
    Colligation c1 = scalar(i1, std::sqrt(2.0)), c2 = scalar(2.0 * i1, 2.0);
    Colligation p = product(c1, c2);
    // i * sqrt2 * 1 * 2
    CHECK(std::abs(p.A(0, 1) - cplx(0, 2 * std::sqrt(2.0))) < 1e-15);
    CHECK(p.A(1, 0) == cplx(0));
    CHECK(validate(p).pass);

    std::mt19937_64 rng(6);
    Signature J({1, -1});
    Colligation a = random_colligation(3, J, rng);
    Colligation closed{random_hermitian(2, rng), Mat::Zero(2, 2), J};
    Colligation q = product(a, closed);
    CHECK(q.A.topRightCorner(3, 2).norm() == 0.0);
    cplx z(0.3, 1.7);
    CHECK(norm2(eval_S(q, z).S - eval_S(a, z).S) < 1e-12);

    CHECK_THROWS_AS(product(a, scalar(i1, std::sqrt(2.0))), ExternalMismatch);
}

TEST_CASE("product is associative") {
    std::mt19937_64 rng(7);
    Signature J({1, 1, -1});
    Colligation a = random_colligation(2, J, rng), b = random_colligation(3, J, rng), c = random_colligation(2, J, rng);
    Colligation l = product(product(a, b), c), r = product(a, product(b, c));
    CHECK((l.A - r.A).norm() < 1e-14);
    CHECK((l.Phi - r.Phi).norm() == 0.0);
}

TEST_CASE("resolvent of a product") {
    Colligation c1 = scalar(i1, std::sqrt(2.0)), c2 = scalar(2.0 * i1, 2.0);
    cplx z(0, 3);
    Mat R = resolvent_of_product(c1, c2, z);
    // inverse of [[a, b], [0, d]] - z by hand
    cplx a = i1 - z, d = 2.0 * i1 - z, b(0, 2 * std::sqrt(2.0));
    CHECK(std::abs(R(0, 0) - 1.0 / a) < 1e-12);
    CHECK(std::abs(R(1, 1) - 1.0 / d) < 1e-12);
    CHECK(std::abs(R(0, 1) + b / (a * d)) < 1e-12);
    CHECK(std::abs(R(1, 0)) == 0.0);

    std::mt19937_64 rng(8);
    Signature J({1, -1});
    Colligation p = random_colligation(3, J, rng), q = random_colligation(4, J, rng);
    Mat A = product(p, q).A;
    cplx w(0.4, -0.9);
    Mat direct = (A - w * Mat::Identity(7, 7)).inverse();
    CHECK(norm2(resolvent_of_product(p, q, w) - direct) <= 1e-9);

    Colligation h1{random_hermitian(2, rng), Mat::Zero(2, 2), J}, h2{random_hermitian(2, rng), Mat::Zero(2, 2), J};
    Mat Rb = resolvent_of_product(h1, h2, w);
    CHECK(Rb.topRightCorner(2, 2).norm() == 0.0);

    CHECK_THROWS_AS(resolvent_of_product(c1, c2, i1), Singular);
}

TEST_CASE("project") {
    std::mt19937_64 rng(9);
    Signature J({1, -1});
    Colligation c = random_colligation(4, J, rng);
    Colligation same = project(c, SubspaceBasis::full(4));
    CHECK(same.A == c.A);
    CHECK(same.Phi == c.Phi);

    Colligation none = project(c, SubspaceBasis(Mat(4, 0)));
    CHECK(none.n() == 0);
    CHECK(eval_S(none, cplx(1, 1)).S == Mat::Identity(2, 2));

    // invariant subspace: first two Schur vectors
    SchurResult s = schur(c.A);
    SubspaceBasis H1(s.Q.leftCols(2)), H2(s.Q.rightCols(2));
    Colligation p1 = project(c, H1), p2 = project(c, H2);
    CHECK(validate(p1).pass);
    CHECK(validate(p2).pass);
    Colligation prod = product(p1, p2);
    Colligation rotated = project(c, SubspaceBasis(s.Q));
    CHECK(norm2(prod.A - rotated.A) < 1e-10);
    CHECK(norm2(prod.Phi - rotated.Phi) < 1e-12);
}

TEST_CASE("principal_split examples") {
    std::mt19937_64 rng(10);
    Colligation closed{random_hermitian(3, rng), Mat::Zero(1, 3), Signature({1})};
    PrincipalSplit ps = principal_split(closed);
    CHECK(ps.basis.k() == 0);
    CHECK(ps.redundant.n() == 3);

    Mat A = Mat::Zero(2, 2);
    A(0, 0) = i1;
    A(1, 1) = 5;
    Mat Phi(1, 2);
    Phi << std::sqrt(2.0), 0;
    Colligation c{A, Phi, Signature({1})};
    ps = principal_split(c);
    REQUIRE(ps.basis.k() == 1);
    CHECK(std::abs(std::abs(ps.basis.columns(0, 0)) - 1.0) < 1e-14);
    REQUIRE(ps.redundant.n() == 1);
    CHECK(std::abs(ps.redundant.A(0, 0) - 5.0) < 1e-14);
    CHECK_FALSE(is_simple(c));

    for (int trial = 0; trial < 5; ++trial) {
        Mat M = random_matrix(5, 5, rng);
        Colligation e = embed(M);
        REQUIRE(e.r() == 5);
        CHECK(is_simple(e));
    }
}

TEST_CASE("principal part has the same characteristic function") {
    std::mt19937_64 rng(11);
    Signature J({1, -1});
    Colligation simple = random_colligation(3, J, rng);
    Colligation closed{random_hermitian(2, rng), Mat::Zero(2, 2), J};
    Colligation c = product(simple, closed);
    Mat U = random_unitary(5, rng);
    c = project(c, SubspaceBasis(U));
    PrincipalSplit ps = principal_split(c);
    CHECK(ps.basis.k() == 3);
    CHECK(norm2(ps.redundant.A - ps.redundant.A.adjoint()) < 1e-9);
    for (int k = 0; k < 5; ++k) {
        cplx z = random_point(rng, 0.5, 3.0);
        CHECK(norm2(eval_S(ps.principal, z).S - eval_S(c, z).S) < 1e-8);
    }
}

TEST_CASE("is_simple") {
    std::mt19937_64 rng(12);
    Colligation closed{random_hermitian(2, rng), Mat::Zero(1, 2), Signature({1})};
    CHECK_FALSE(is_simple(closed));
    CHECK(is_simple(scalar(cplx(0.3, 1.1), std::sqrt(2.2))));
}

TEST_CASE("chain factorization") {
    std::mt19937_64 rng(13);
    Signature J({1, -1});
    Colligation c = random_colligation(3, J, rng);
    auto single = chain_factorization(c, {SubspaceBasis::full(3)});
    REQUIRE(single.factors.size() == 1);
    CHECK(norm2(single.factors[0].A - c.A) < 1e-14);

    Colligation d = embed(random_dissipative(3, 3, rng));
    SchurResult s = schur(d.A);
    std::vector<SubspaceBasis> chain;
    for (int k = 1; k <= 3; ++k) chain.emplace_back(s.Q.leftCols(k));
    auto cf = chain_factorization(d, chain);
    REQUIRE(cf.factors.size() == 3);
    cplx z(0, 10);
    Mat prod = Mat::Identity(d.r(), d.r());
    for (const auto& f : cf.factors) {
        CHECK(f.n() == 1);
        prod = prod * eval_S(f, z).S;
    }
    CHECK(norm2(prod - eval_S(d, z).S) < 1e-10);
    // product of factors equals c after alignment
    Colligation whole = cf.factors[0];
    for (std::size_t k = 1; k < cf.factors.size(); ++k) whole = product(whole, cf.factors[k]);
    Colligation aligned = project(d, SubspaceBasis(cf.basis));
    CHECK(norm2(whole.A - aligned.A) < 1e-10);

    Mat e0 = Mat::Zero(3, 1);
    e0(0, 0) = 1;
    CHECK_THROWS_AS(chain_factorization(c, {SubspaceBasis(e0)}), NotInvariant);
}

TEST_CASE("unitary equivalence") {
    std::mt19937_64 rng(14);
    Signature J({1, -1});
    Colligation c = random_colligation(4, J, rng);
    auto self = unitary_equivalence(c, c);
    REQUIRE(self.U);
    CHECK(norm2(*self.U - Mat::Identity(4, 4)) < 1e-8);

    Mat V = random_unitary(4, rng);
    Colligation c2{V * c.A * V.adjoint(), c.Phi * V.adjoint(), J};
    auto rot = unitary_equivalence(c, c2);
    REQUIRE(rot.U);
    CHECK(norm2(*rot.U - V) < 1e-8);
    CHECK(rot.residual < 1e-8);

    Colligation a1 = scalar(i1, std::sqrt(2.0)), a2 = scalar(2.0 * i1, 2.0);
    // different S at 3i: 2 versus 5
    CHECK(std::abs(eval_S(a1, 3.0 * i1).S(0, 0) - eval_S(a2, 3.0 * i1).S(0, 0)) > 1);
    CHECK_FALSE(unitary_equivalence(a1, a2).U);

    Colligation closed{random_hermitian(4, rng), Mat::Zero(2, 4), J};
    CHECK_THROWS_AS(unitary_equivalence(c, closed), NotSimple);
}

TEST_CASE("spectrum of a product is the union of the factor spectra") {
    std::mt19937_64 rng(15);
    Signature J({1, 1});
    for (int trial = 0; trial < 5; ++trial) {
        Colligation a = random_colligation(3, J, rng), b = random_colligation(2, J, rng);
        Eigen::ComplexEigenSolver<Mat> ea(a.A, false), eb(b.A, false), ep(product(a, b).A, false);
        std::vector<cplx> want, got;
        for (int k = 0; k < 3; ++k) want.push_back(ea.eigenvalues()(k));
        for (int k = 0; k < 2; ++k) want.push_back(eb.eigenvalues()(k));
        for (int k = 0; k < 5; ++k) got.push_back(ep.eigenvalues()(k));
        for (cplx w : want) {
            double best = 1e300;
            for (cplx g : got) best = std::min(best, std::abs(w - g));
            CHECK(best < 1e-8);
        }
    }
}

TEST_CASE("adjoint reverses products") {
    std::mt19937_64 rng(16);
    Signature J({1, -1});
    Colligation a = random_colligation(2, J, rng), b = random_colligation(3, J, rng);
    Colligation lhs = adjoint(product(a, b));
    Colligation rhs = product(adjoint(b), adjoint(a));
    // permute blocks (a-part, b-part) -> (b-part, a-part)
    Mat P = Mat::Zero(5, 5);
    for (int k = 0; k < 3; ++k) P(2 + k, k) = 1;
    for (int k = 0; k < 2; ++k) P(k, 3 + k) = 1;
    CHECK(norm2(P.adjoint() * lhs.A * P - rhs.A) < 1e-12);
    CHECK(norm2(lhs.Phi * P - rhs.Phi) < 1e-14);
    CHECK(lhs.J == rhs.J);
}

TEST_CASE("redundant part of a product meets each factor space") {
    auto build = [](cplx a, double phi, double h) {
        Mat A = Mat::Zero(2, 2);
        A(0, 0) = a;
        A(1, 1) = h;
        Mat Phi(1, 2);
        Phi << phi, 0;
        return Colligation{A, Phi, Signature({1})};
    };
    Colligation c1 = build(i1, std::sqrt(2.0), 5), c2 = build(2.0 * i1, 2.0, 7);
    Colligation p = product(c1, c2);
    PrincipalSplit ps = principal_split(p);
    Mat R = ps.complement.columns;
    CHECK(R.cols() == 2);
    Mat H1 = Mat::Identity(4, 4).leftCols(2), H2 = Mat::Identity(4, 4).rightCols(2);
    auto meet = [&](const Mat& H) {
        Mat both(4, R.cols() + H.cols());
        both << R, H;
        return R.cols() + H.cols() - rank_of(both);
    };
    CHECK(meet(H1) == principal_split(c1).complement.k());
    CHECK(meet(H2) == principal_split(c2).complement.k());
}
