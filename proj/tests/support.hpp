#pragma once

#include <random>

#include "livsic/colligation.hpp"

namespace livsic::testing {

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Mat M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = cplx(g(rng), g(rng));
    return M;
}

inline Mat random_hermitian(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    Mat X = random_matrix(n, n, rng, scale);
    return (X + X.adjoint()) * 0.5;
}

inline Mat random_unitary(Eigen::Index n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Mat> qr(random_matrix(n, n, rng));
    return qr.householderQ() * Mat::Identity(n, n);
}

inline Signature random_signature(Eigen::Index r, std::mt19937_64& rng) {
    std::vector<int> s(static_cast<std::size_t>(r));
    std::bernoulli_distribution coin(0.5);
    for (auto& v : s) v = coin(rng) ? 1 : -1;
    return Signature(s);
}

// A = H + (i/2) Phi* J Phi with random H, Phi.
inline Colligation random_colligation(Eigen::Index n, const Signature& J, std::mt19937_64& rng,
                                      double scale = 1.0) {
    Mat H = random_hermitian(n, rng, scale);
    Mat Phi = random_matrix(J.r(), n, rng, 0.7);
    Mat A = H + cplx(0, 0.5) * (Phi.adjoint() * apply_J_left(J, Phi));
    return {A, Phi, J};
}

// Dissipative A = H + i K K* with K of rank k.
inline Mat random_dissipative(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
    Mat K = random_matrix(n, k, rng, 0.6);
    return random_hermitian(n, rng) + cplx(0, 1) * (K * K.adjoint());
}

inline cplx random_point(std::mt19937_64& rng, double lo_im, double hi_im, double re_span = 4.0) {
    std::uniform_real_distribution<double> re(-re_span, re_span), im(lo_im, hi_im);
    return {re(rng), im(rng)};
}

}  // namespace livsic::testing
