#include <doctest.h>

#include <cmath>

#include "livsic/charfn.hpp"
#include "livsic/factorize.hpp"
#include "support.hpp"

using namespace livsic;
using namespace livsic::testing;

namespace {

const cplx i1{0, 1};

Vec v1(cplx x) { return Vec::Constant(1, x); }

}  // namespace

TEST_CASE("factorize the scalar colligation") {
    Colligation a = mobius_charfn(i1).colligation();
    BlaschkeProduct bp = potapov_factorize(a);
    REQUIRE(bp.factors.size() == 1);
    CHECK(std::abs(bp.factors[0].lambda - i1) < 1e-15);
    CHECK(std::abs(bp.factors[0].eta(0)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(j_dot(bp.J, bp.factors[0].eta, bp.factors[0].eta).real() == doctest::Approx(2.0));
}

TEST_CASE("Hermitian fundamental operator gives commuting real factors") {
    std::mt19937_64 rng(1);
    Colligation c = embed(random_hermitian(3, rng), SubspaceBasis::full(3));
    REQUIRE(c.r() == 6);
    BlaschkeProduct bp = potapov_factorize(c);
    cplx z(0.7, 1.9);
    std::vector<Mat> F;
    for (const auto& f : bp.factors) {
        CHECK(std::abs(f.lambda.imag()) < 1e-12);
        F.push_back(eval_factor(f, bp.J, z));
    }
    for (std::size_t a = 0; a < F.size(); ++a)
        for (std::size_t b = 0; b < F.size(); ++b) CHECK(norm2(F[a] * F[b] - F[b] * F[a]) <= 1e-10);
}

TEST_CASE("reconstruction for a dissipative 6x6 colligation") {
    std::mt19937_64 rng(2);
    Colligation c = embed(random_dissipative(6, 2, rng));
    REQUIRE(c.r() == 2);
    BlaschkeProduct bp = potapov_factorize(c);
    for (cplx z : {cplx(0, 10), cplx(3, 4), cplx(-7, 2)}) CHECK(norm2(eval_S(c, z).S - eval_product(bp, z)) <= 1e-8);
    auto rep = constraint_suite(bp, c.Phi);
    CHECK(rep.eta_residual <= 1e-9);
    CHECK(rep.gram_residual <= 1e-8);
    CHECK(rep.trace_slack >= -1e-9);
    for (std::size_t k = 1; k < bp.factors.size(); ++k)
        CHECK(bp.factors[k - 1].lambda.real() <= bp.factors[k].lambda.real());
}

TEST_CASE("eval_factor") {
    Signature J({1});
    CHECK(eval_factor({i1, Vec::Zero(1)}, J, cplx(1, 1)) == Mat::Identity(1, 1));
    ElementaryFactor f{i1, v1(std::sqrt(2.0))};
    // 1 + i 2/(2i - i) = 3
    CHECK(std::abs(eval_factor(f, J, 2.0 * i1)(0, 0) - 3.0) < 1e-14);
    CHECK(std::abs(eval_factor(f, J, 2.0 * i1)(0, 0) - mobius_charfn(i1)(2.0 * i1)) < 1e-14);
    CHECK(std::abs(std::abs(eval_factor(f, J, 5.0)(0, 0)) - 1.0) < 1e-12);
    CHECK_THROWS_AS(eval_factor(f, J, i1), PoleAt);
}

TEST_CASE("eval_product") {
    Signature J({1});
    BlaschkeProduct empty{J, {}};
    CHECK(eval_product(empty, cplx(2, 3)) == Mat::Identity(1, 1));
    BlaschkeProduct two{J, {{i1, v1(std::sqrt(2.0))}, {2.0 * i1, v1(2.0)}}};
    cplx z(0, 3);
    cplx oracle = (z + i1) / (z - i1) * ((z + 2.0 * i1) / (z - 2.0 * i1));
    CHECK(std::abs(oracle - 10.0) < 1e-14);
    CHECK(std::abs(eval_product(two, z)(0, 0) - oracle) < 1e-13);
}

TEST_CASE("additive form for Hermitian A") {
    // A = 0 with the full channel: S(z) = I + (i/z) Phi Phi* J
    Colligation zero = embed(Mat::Zero(1, 1), SubspaceBasis::full(1));
    REQUIRE(zero.r() == 2);
    AdditiveCharFn add = selfadjoint_charfn(zero);
    cplx z(0.5, 2);
    Mat want = Mat::Identity(2, 2) + (i1 / z) * zero.Phi * zero.Phi.adjoint() * zero.J.matrix();
    CHECK(norm2(add(z) - want) < 1e-14);
    CHECK(norm2(add(z) - eval_S(zero, z).S) < 1e-14);

    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 2;
    Colligation d = embed(D, SubspaceBasis::full(2));
    AdditiveCharFn ad = selfadjoint_charfn(d);
    CHECK(ad.lambdas().size() == 2);
    CHECK(ad.lambdas()(0) == doctest::Approx(1));
    CHECK(ad.lambdas()(1) == doctest::Approx(2));
    CHECK(norm2(ad(cplx(10, 10)) - eval_S(d, cplx(10, 10)).S) <= 1e-10);
    CHECK(norm2(ad(cplx(10, 10)) - eval_product(potapov_factorize(d), cplx(10, 10))) <= 1e-9);

    Colligation a = mobius_charfn(i1).colligation();
    CHECK_THROWS_AS(selfadjoint_charfn(a), NotHermitian);
}

TEST_CASE("random colligations: reconstruction, constraints, J-unitary factors") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Index n = 1 + trial % 8, r = 1 + trial % 3;
        Signature J = random_signature(r, rng);
        Colligation c = random_colligation(n, J, rng);
        BlaschkeProduct bp = potapov_factorize(c);
        auto rep = constraint_suite(bp, c.Phi);
        CHECK(rep.eta_residual <= 1e-9);
        CHECK(rep.gram_residual <= 1e-8);
        CHECK(rep.trace_slack >= -1e-9);
        for (int k = 0; k < 10; ++k) {
            cplx z = random_point(rng, 0.5, 4) * (k % 2 ? 1.0 : -1.0);
            CHECK(norm2(eval_S(c, z).S - eval_product(bp, z)) <= 1e-8);
        }
        for (const auto& f : bp.factors) {
            if (std::abs(f.lambda.imag()) < 1e-3) continue;
            Mat F = eval_factor(f, J, cplx(0.37, 0));
            CHECK(norm2(j_form(F, J)) <= 1e-10 * (1 + std::pow(norm2(F), 2)));
        }
    }
}

TEST_CASE("real spectrum: factorization matches the ordered Schur chain") {
    Mat A(3, 3);
    A << 3, 2, 1, 0, 1, cplx(0, 1), 0, 0, 2;
    // eigenvalues 3, 1, 2 are real; Im A is indefinite
    Colligation c = embed(A);
    BlaschkeProduct bp = potapov_factorize(c);
    SchurResult s = schur(A, SchurOrder::RealThenImag);
    std::vector<SubspaceBasis> chain;
    for (int k = 1; k <= 3; ++k) chain.emplace_back(s.Q.leftCols(k));
    auto cf = chain_factorization(c, chain);
    REQUIRE(cf.factors.size() == bp.factors.size());
    for (std::size_t k = 0; k < cf.factors.size(); ++k) {
        CHECK(std::abs(cf.factors[k].A(0, 0) - bp.factors[k].lambda) < 1e-10);
        CHECK((cf.factors[k].Phi.col(0) - bp.factors[k].eta).norm() < 1e-10);
    }
    CHECK(bp.factors[0].lambda.real() == doctest::Approx(1));
    CHECK(bp.factors[2].lambda.real() == doctest::Approx(3));
}
