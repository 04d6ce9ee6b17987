#pragma once

#include <complex>

#include <Eigen/Dense>

#include "livsic/errors.hpp"

namespace livsic {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I_UNIT{0.0, 1.0};

// Spectral norm (largest singular value). Zero for empty matrices.
double norm2(const Mat& M);

// (M + M*)/2 and (M - M*)/(2i).
Mat re_part(const Mat& M);
Mat im_part(const Mat& M);

struct HermitianEig {
    RVec values;  // ascending
    Mat vectors;  // unitary, columns are eigenvectors
};

// Throws NotHermitian if ||M - M*|| > 1e-12 ||M|| (Frobenius norms).
HermitianEig hermitian_eig(const Mat& M);

enum class SchurOrder {
    AsComputed,       // output of the QR iteration, unchanged
    RealThenImag,     // ascending (Re, Im), ties kept in computed order
};

struct SchurResult {
    Mat Q;  // unitary
    Mat T;  // upper triangular, M = Q T Q*
};

SchurResult schur(const Mat& M, SchurOrder order = SchurOrder::AsComputed);

// Swap the adjacent diagonal entries k, k+1 of an upper triangular T by a
// unitary similarity, accumulating into Q.
void schur_swap(Mat& Q, Mat& T, Eigen::Index k);

Mat expm(const Mat& M);

enum class HermFn { AbsSqrt, Sign };

// Functional calculus on a Hermitian matrix. Eigenvalues with magnitude
// below 1e-12 ||M|| count as zero.
Mat hermitian_calculus(const Mat& M, HermFn which);

// Solves M X = B. Throws Singular when the condition estimate exceeds 1e12.
Mat solve(const Mat& M, const Mat& B);

// Reciprocal condition estimate of a square matrix (1-norm, from LU).
double rcond(const Mat& M);

// Orthonormal basis for the column range of M. Singular values at or below
// tol are discarded.
Mat orth(const Mat& M, double tol);

// Orthonormal basis for the orthogonal complement of ran(V), V orthonormal.
Mat orth_complement(const Mat& V, Eigen::Index n);

// Smallest eigenvalue of the Hermitian part of H. +inf for empty input.
double min_eig(const Mat& H);

}  // namespace livsic
