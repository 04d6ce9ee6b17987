#pragma once

#include <optional>
#include <vector>

#include "livsic/numerics.hpp"

namespace livsic {

// Signature J = diag(signs), each entry exactly +1 or -1.
struct Signature {
    std::vector<int> signs;

    Signature() = default;
    explicit Signature(std::vector<int> s);
    static Signature plus(std::size_t r) { return Signature(std::vector<int>(r, 1)); }

    Eigen::Index r() const { return static_cast<Eigen::Index>(signs.size()); }
    Mat matrix() const;
    RVec diag() const;
    Signature negated() const;
    bool operator==(const Signature& o) const { return signs == o.signs; }
    bool operator!=(const Signature& o) const { return signs != o.signs; }
};

// Multiply by J from the left / right without forming the matrix.
Mat apply_J_left(const Signature& J, const Mat& X);
Mat apply_J_right(const Mat& X, const Signature& J);

// x* J y
cplx j_dot(const Signature& J, const Vec& x, const Vec& y);

// (A, Phi, J): A is n x n, Phi is r x n, (A - A*)/i = Phi* J Phi.
struct Colligation {
    Mat A;
    Mat Phi;
    Signature J;

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index r() const { return J.r(); }

    static Colligation empty(const Signature& J);
};

struct SubspaceBasis {
    Mat columns;  // n x k, orthonormal

    SubspaceBasis() = default;
    explicit SubspaceBasis(Mat cols);  // checks orthonormality to 1e-10
    static SubspaceBasis full(Eigen::Index n) { return SubspaceBasis(Mat::Identity(n, n)); }
    static SubspaceBasis span_of(const Mat& M, double tol = 1e-12);

    Eigen::Index n() const { return columns.rows(); }
    Eigen::Index k() const { return columns.cols(); }
};

struct ValidationReport {
    double signature_residual = 0;  // ||J* - J|| + ||J^2 - I||
    double identity_residual = 0;   // ||(A - A*)/i - Phi* J Phi||
    double tol = 0;
    bool pass = false;
};

// 1e-10 (||A|| + ||Phi||^2)
double default_tolerance(const Colligation& c);

ValidationReport validate(const Colligation& c, double tol);
ValidationReport validate(const Colligation& c);

// Embedding of A in a colligation. Without a channel the external space is
// ran(Im A); a channel must contain ran(Im A). The signature is canonical:
// +1 entries first.
Colligation embed(const Mat& A, const std::optional<SubspaceBasis>& channel = std::nullopt);

Colligation adjoint(const Colligation& c);

Colligation product(const Colligation& c1, const Colligation& c2);

// (A - zI)^{-1} for A = product(c1, c2), assembled from the factor resolvents.
Mat resolvent_of_product(const Colligation& c1, const Colligation& c2, cplx z);

Colligation project(const Colligation& c, const SubspaceBasis& sub);

struct PrincipalSplit {
    Colligation principal;
    Colligation redundant;
    SubspaceBasis basis;       // spans the principal subspace
    SubspaceBasis complement;  // spans the redundant subspace
};

PrincipalSplit principal_split(const Colligation& c, double tol = 1e-9);

bool is_simple(const Colligation& c, double tol = 1e-9);

struct ChainFactorization {
    std::vector<Colligation> factors;
    Mat basis;  // concatenated orthonormal bases of H_k minus H_{k-1}
};

// chain: strictly increasing nested subspaces, each invariant under A. The
// full space is appended when missing.
ChainFactorization chain_factorization(const Colligation& c, const std::vector<SubspaceBasis>& chain,
                                       double tol = 1e-8);

struct EquivalenceResult {
    std::optional<Mat> U;
    double gram_residual = 0;
    double residual = 0;  // max(||U A1 - A2 U||, ||Phi1 - Phi2 U||) when U was formed
};

// depth <= 0 selects n1 + n2.
EquivalenceResult unitary_equivalence(const Colligation& c1, const Colligation& c2, int depth = 0,
                                      double tol = 1e-8);

}  // namespace livsic
