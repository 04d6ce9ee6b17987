#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "livsic/numerics.hpp"

namespace livsic {

using ScalarFn = std::function<cplx(double)>;
using MatFn = std::function<Mat(double)>;

// Matrix weight H(t) on [a, b]. Three concrete sources:
//   from_function  pointwise values H(t) (jumps allowed)
//   from_samples   grid values, piecewise-linear in between
//   from_density   H(t) = integral of M from a to t (Gauss-Legendre)
class StieltjesWeight {
public:
    static StieltjesWeight from_function(double a, double b, MatFn H);
    static StieltjesWeight from_samples(std::vector<double> grid, std::vector<Mat> H);
    static StieltjesWeight from_density(double a, double b, MatFn M);

    double a() const { return a_; }
    double b() const { return b_; }
    Eigen::Index dim() const { return dim_; }

    Mat increment(double t0, double t1) const;  // H(t1) - H(t0)
    StieltjesWeight restrict(double t0, double t1) const;

    const std::vector<double>& grid() const { return grid_; }
    bool has_density() const { return static_cast<bool>(M_); }
    const MatFn& density() const { return M_; }

    // max ||H(t_{k+1}) - H(t_k)|| / (t_{k+1} - t_k) over a uniform probe grid
    // (and over the sample grid when there is one)
    double lipschitz_estimate(int probes = 256) const;

private:
    enum class Kind { Function, Samples, Density };
    Kind kind_ = Kind::Function;
    double a_ = 0, b_ = 1;
    Eigen::Index dim_ = 0;
    MatFn H_, M_;
    std::vector<double> grid_;
    std::shared_ptr<const std::vector<Mat>> samples_;

    Mat sample_value(double t) const;
    Mat density_integral(double t0, double t1) const;
};

enum class XiRule { Left, Mid, Right };

// Right-ordered product of exp(f(xi_j) (H(t_{j+1}) - H(t_j))) over the
// partition points t_0 < ... < t_m.
Mat partial_product(const ScalarFn& f, const StieltjesWeight& w, const std::vector<double>& partition,
                    XiRule xi = XiRule::Mid);

// Same, with the partition given as indices into w.grid().
Mat partial_product(const ScalarFn& f, const StieltjesWeight& w, const std::vector<std::size_t>& indices,
                    XiRule xi = XiRule::Mid);

// Left-ordered product of exp(-f(xi_j) dH_j), the inverse of partial_product.
Mat partial_product_inverse(const ScalarFn& f, const StieltjesWeight& w,
                            const std::vector<double>& partition, XiRule xi = XiRule::Mid);

std::vector<double> uniform_partition(double a, double b, long cells);

struct ProductIntegralResult {
    Mat value;
    Mat inverse;
    int levels = 0;      // dyadic level accepted by the Cauchy test
    long steps = 0;      // accepted ODE steps (ode route)
    double residual = 0; // Cauchy residual at termination
};

// Dyadic refinement with midpoint rule. At level L the product over 2^L
// cells is compared with level L+1 and with a partition staggered by half a
// cell; both the product and its inverse must agree within tol.
ProductIntegralResult multint_stieltjes(const ScalarFn& f, const StieltjesWeight& w, double tol,
                                        int max_levels = 20, XiRule xi = XiRule::Mid);

enum class LebesgueMethod { Product, Ode };

// Integral of exp(M(t) dt) over [a, b]; the ode route solves
// dW/dt = W M(t), W(a) = I with an adaptive Dormand-Prince 5(4) pair.
ProductIntegralResult multint_lebesgue(const MatFn& M, double a, double b, LebesgueMethod method,
                                       double tol, Eigen::Index dim);

// W(t) for each requested time (ascending, all >= a).
std::vector<Mat> ode_trajectory(const MatFn& M, double a, const std::vector<double>& times, double tol,
                                Eigen::Index dim);

// max over a uniform grid of ||W(t) - I - int_a^t W M||.
double integral_equation_residual(const MatFn& M, double a, double b, double tol, Eigen::Index dim,
                                  int points = 100);

struct BoundReport {
    double rho = 0;       // sum |f(xi_j)| ||dH_j||
    double norm_W = 0;
    double slack_norm = 0;    // e^rho - ||W||
    double slack_unit = 0;    // rho e^rho - ||W - I||
    double slack_linear = 0;  // rho^2 e^rho / 2 - ||W - I - sum f dH||
};

// Evaluated on the uniform partition with 2^level cells.
BoundReport bound_suite(const ScalarFn& f, const StieltjesWeight& w, int level = 10);

struct SplitInverseResidual {
    double split = 0;    // ||W_ab - W_ac W_cb||
    double inverse = 0;  // ||W_ab^{-1} - left-ordered product of exp(-f dH)||
};

SplitInverseResidual split_and_inverse_identities(const ScalarFn& f, const StieltjesWeight& w, double c,
                                                  double tol);

struct HellyReport {
    std::vector<double> residuals;
    bool monotone = false;
    bool converged = false;  // final residual <= tol
};

// Throws HypothesisViolated if some |f_n| exceeds K or some H_n has a
// Lipschitz estimate above L.
HellyReport helly_harness(const std::vector<ScalarFn>& fs, const std::vector<StieltjesWeight>& ws,
                          const ScalarFn& f, const StieltjesWeight& w, double K, double L, double tol);

}  // namespace livsic
