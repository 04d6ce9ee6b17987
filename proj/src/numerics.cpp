#include "livsic/numerics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace livsic {

double norm2(const Mat& M) {
    if (M.size() == 0) return 0.0;
    if (M.rows() == 1 || M.cols() == 1) return M.norm();
    Eigen::BDCSVD<Mat> svd(M);
    return svd.singularValues()(0);
}

Mat re_part(const Mat& M) { return (M + M.adjoint()) * 0.5; }

Mat im_part(const Mat& M) { return (M - M.adjoint()) / cplx(0.0, 2.0); }

namespace {

void require_square(const Mat& M, const char* who) {
    if (M.rows() != M.cols())
        throw ShapeMismatch(std::string(who) + ": matrix is not square");
}

void require_hermitian(const Mat& M, const char* who) {
    require_square(M, who);
    double scale = M.norm();
    double asym = (M - M.adjoint()).norm();
    if (asym > 1e-12 * scale)
        throw NotHermitian(std::string(who) + ": symmetry residual " + std::to_string(asym));
}

}  // namespace

HermitianEig hermitian_eig(const Mat& M) {
    require_hermitian(M, "hermitian_eig");
    if (M.rows() == 0) return {RVec(0), Mat(0, 0)};
    Mat H = re_part(M);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("hermitian_eig: solver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

void schur_swap(Mat& Q, Mat& T, Eigen::Index k) {
    cplx t11 = T(k, k), t22 = T(k + 1, k + 1), t12 = T(k, k + 1);
    // eigenvector of the 2x2 block belonging to t22
    cplx x = t12, y = t22 - t11;
    double nrm = std::hypot(std::abs(x), std::abs(y));
    if (nrm == 0.0) return;
    x /= nrm;
    y /= nrm;
    Eigen::Matrix2cd G;
    G << x, -std::conj(y), y, std::conj(x);
    T.middleRows(k, 2) = G.adjoint() * T.middleRows(k, 2);
    T.middleCols(k, 2) = T.middleCols(k, 2) * G;
    Q.middleCols(k, 2) = Q.middleCols(k, 2) * G;
    T(k + 1, k) = 0.0;
}

SchurResult schur(const Mat& M, SchurOrder order) {
    require_square(M, "schur");
    const Eigen::Index n = M.rows();
    if (n == 0) return {Mat(0, 0), Mat(0, 0)};
    Eigen::ComplexSchur<Mat> cs(M);
    if (cs.info() != Eigen::Success) throw ConvergenceFailure("schur: QR iteration did not converge");
    SchurResult out{cs.matrixU(), cs.matrixT()};
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) out.T(i, j) = 0.0;
    if (order == SchurOrder::RealThenImag) {
        auto greater = [](cplx a, cplx b) {
            if (a.real() != b.real()) return a.real() > b.real();
            return a.imag() > b.imag();
        };
        // stable bubble sort by adjacent swaps
        for (Eigen::Index pass = 0; pass < n; ++pass) {
            bool swapped = false;
            for (Eigen::Index k = 0; k + 1 < n - pass; ++k) {
                if (greater(out.T(k, k), out.T(k + 1, k + 1))) {
                    schur_swap(out.Q, out.T, k);
                    swapped = true;
                }
            }
            if (!swapped) break;
        }
    }
    return out;
}

Mat expm(const Mat& M) {
    require_square(M, "expm");
    if (M.rows() == 0) return Mat(0, 0);
    return M.exp();
}

Mat hermitian_calculus(const Mat& M, HermFn which) {
    HermitianEig e = hermitian_eig(M);
    const Eigen::Index n = e.values.size();
    if (n == 0) return Mat(0, 0);
    double cut = 1e-12 * e.values.cwiseAbs().maxCoeff();
    RVec f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = e.values(i);
        if (std::abs(d) <= cut) {
            f(i) = 0.0;
        } else if (which == HermFn::AbsSqrt) {
            f(i) = std::sqrt(std::abs(d));
        } else {
            f(i) = d > 0 ? 1.0 : -1.0;
        }
    }
    return e.vectors * f.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

namespace {

// Eigen's estimate alone misses exactly zero pivots, so the pivot spread is
// folded in as well.
double lu_rcond(const Eigen::PartialPivLU<Mat>& lu) {
    RVec piv = lu.matrixLU().diagonal().cwiseAbs();
    double hi = piv.maxCoeff();
    if (!(hi > 0) || !std::isfinite(hi)) return 0.0;
    return std::min(lu.rcond(), piv.minCoeff() / hi);
}

}  // namespace

double rcond(const Mat& M) {
    require_square(M, "rcond");
    if (M.rows() == 0) return 1.0;
    Eigen::PartialPivLU<Mat> lu(M);
    return lu_rcond(lu);
}

Mat solve(const Mat& M, const Mat& B) {
    require_square(M, "solve");
    if (M.rows() != B.rows()) throw ShapeMismatch("solve: right-hand side has wrong row count");
    if (M.rows() == 0) return Mat(0, B.cols());
    Eigen::PartialPivLU<Mat> lu(M);
    double rc = lu_rcond(lu);
    if (!(rc * 1e12 > 1.0)) throw Singular("solve: condition estimate " + std::to_string(1.0 / rc));
    return lu.solve(B);
}

Mat orth(const Mat& M, double tol) {
    if (M.cols() == 0 || M.rows() == 0) return Mat(M.rows(), 0);
    Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeThinU);
    const RVec& s = svd.singularValues();
    Eigen::Index k = 0;
    while (k < s.size() && s(k) > tol) ++k;
    return svd.matrixU().leftCols(k);
}

Mat orth_complement(const Mat& V, Eigen::Index n) {
    const Eigen::Index k = V.cols();
    if (k == 0) return Mat::Identity(n, n);
    if (k >= n) return Mat(n, 0);
    Eigen::HouseholderQR<Mat> qr(V);
    Mat Qfull = qr.householderQ() * Mat::Identity(n, n);
    return Qfull.rightCols(n - k);
}

double min_eig(const Mat& H) {
    if (H.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Mat> es(re_part(H), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace livsic
