#include "livsic/multint.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace livsic {

namespace {

constexpr std::array<double, 8> kGLx = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLw = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

double one_norm(const Mat& X) { return X.cwiseAbs().colwise().sum().maxCoeff(); }

// Taylor series for the tiny exponents of fine partitions; expm otherwise.
Mat expm_fast(const Mat& X) {
    const Eigen::Index r = X.rows();
    if (X.isZero(0.0)) return Mat::Identity(r, r);
    if (one_norm(X) < 0.1) {
        Mat E = Mat::Identity(r, r);
        for (int k = 12; k >= 1; --k) E = Mat::Identity(r, r) + (X * E) / static_cast<double>(k);
        return E;
    }
    return expm(X);
}

double xi_point(double t0, double t1, XiRule xi) {
    switch (xi) {
        case XiRule::Left: return t0;
        case XiRule::Right: return t1;
        case XiRule::Mid: break;
    }
    return 0.5 * (t0 + t1);
}

struct ProductPair {
    Mat value;
    Mat inverse;
};

ProductPair product_pair(const ScalarFn& f, const StieltjesWeight& w, const std::vector<double>& part,
                         XiRule xi) {
    const Eigen::Index r = w.dim();
    ProductPair p{Mat::Identity(r, r), Mat::Identity(r, r)};
    for (std::size_t j = 0; j + 1 < part.size(); ++j) {
        cplx fv = f(xi_point(part[j], part[j + 1], xi));
        if (fv == cplx(0.0)) continue;
        Mat X = fv * w.increment(part[j], part[j + 1]);
        if (X.isZero(0.0)) continue;
        p.value = p.value * expm_fast(X);
        p.inverse = expm_fast(-X) * p.inverse;
    }
    return p;
}

std::vector<double> staggered_partition(double a, double b, long cells) {
    const double h = (b - a) / static_cast<double>(cells);
    std::vector<double> part{a};
    for (long k = 0; k < cells; ++k) part.push_back(a + (static_cast<double>(k) + 0.5) * h);
    part.push_back(b);
    return part;
}

}  // namespace

StieltjesWeight StieltjesWeight::from_function(double a, double b, MatFn H) {
    if (!(b > a)) throw ShapeMismatch("StieltjesWeight: need a < b");
    StieltjesWeight w;
    w.kind_ = Kind::Function;
    w.a_ = a;
    w.b_ = b;
    w.dim_ = H(a).rows();
    w.H_ = std::move(H);
    return w;
}

StieltjesWeight StieltjesWeight::from_samples(std::vector<double> grid, std::vector<Mat> H) {
    if (grid.size() < 2 || grid.size() != H.size())
        throw ShapeMismatch("StieltjesWeight: need at least two samples, one per grid point");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ShapeMismatch("StieltjesWeight: grid must be strictly increasing");
    const Eigen::Index r = H.front().rows();
    for (const auto& m : H) {
        if (m.rows() != r || m.cols() != r) throw ShapeMismatch("StieltjesWeight: samples must be r x r");
        if (!m.allFinite()) throw ShapeMismatch("StieltjesWeight: non-finite sample");
    }
    StieltjesWeight w;
    w.kind_ = Kind::Samples;
    w.a_ = grid.front();
    w.b_ = grid.back();
    w.dim_ = r;
    w.grid_ = std::move(grid);
    w.samples_ = std::make_shared<const std::vector<Mat>>(std::move(H));
    return w;
}

StieltjesWeight StieltjesWeight::from_density(double a, double b, MatFn M) {
    if (!(b > a)) throw ShapeMismatch("StieltjesWeight: need a < b");
    StieltjesWeight w;
    w.kind_ = Kind::Density;
    w.a_ = a;
    w.b_ = b;
    w.dim_ = M(a).rows();
    w.M_ = std::move(M);
    return w;
}

Mat StieltjesWeight::sample_value(double t) const {
    const auto& g = grid_;
    const auto& s = *samples_;
    if (t <= g.front()) return s.front();
    if (t >= g.back()) return s.back();
    auto it = std::upper_bound(g.begin(), g.end(), t);
    std::size_t k = static_cast<std::size_t>(it - g.begin()) - 1;
    double u = (t - g[k]) / (g[k + 1] - g[k]);
    return (1.0 - u) * s[k] + u * s[k + 1];
}

Mat StieltjesWeight::density_integral(double t0, double t1) const {
    Mat acc = Mat::Zero(dim_, dim_);
    if (t1 == t0) return acc;
    double span = (b_ - a_) / 64.0;
    long pieces = std::max(1L, static_cast<long>(std::ceil(std::abs(t1 - t0) / span)));
    double h = (t1 - t0) / static_cast<double>(pieces);
    for (long p = 0; p < pieces; ++p) {
        double lo = t0 + p * h;
        for (std::size_t q = 0; q < kGLx.size(); ++q)
            acc += (0.5 * h * kGLw[q]) * M_(lo + 0.5 * h * (kGLx[q] + 1.0));
    }
    return acc;
}

Mat StieltjesWeight::increment(double t0, double t1) const {
    switch (kind_) {
        case Kind::Function: return H_(t1) - H_(t0);
        case Kind::Samples: return sample_value(t1) - sample_value(t0);
        case Kind::Density: return density_integral(t0, t1);
    }
    return Mat();
}

StieltjesWeight StieltjesWeight::restrict(double t0, double t1) const {
    if (!(t0 >= a_ && t1 <= b_ && t1 > t0)) throw ShapeMismatch("StieltjesWeight::restrict: bad interval");
    StieltjesWeight w = *this;
    w.a_ = t0;
    w.b_ = t1;
    return w;
}

double StieltjesWeight::lipschitz_estimate(int probes) const {
    double L = 0;
    std::vector<double> pts = uniform_partition(a_, b_, probes);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        L = std::max(L, norm2(increment(pts[k], pts[k + 1])) / (pts[k + 1] - pts[k]));
    if (kind_ == Kind::Samples) {
        for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
            if (grid_[k + 1] <= a_ || grid_[k] >= b_) continue;
            L = std::max(L, norm2((*samples_)[k + 1] - (*samples_)[k]) / (grid_[k + 1] - grid_[k]));
        }
    }
    return L;
}

std::vector<double> uniform_partition(double a, double b, long cells) {
    std::vector<double> part(static_cast<std::size_t>(cells) + 1);
    for (long k = 0; k <= cells; ++k)
        part[static_cast<std::size_t>(k)] = a + (b - a) * static_cast<double>(k) / static_cast<double>(cells);
    part.back() = b;
    return part;
}

Mat partial_product(const ScalarFn& f, const StieltjesWeight& w, const std::vector<double>& partition,
                    XiRule xi) {
    return product_pair(f, w, partition, xi).value;
}

Mat partial_product(const ScalarFn& f, const StieltjesWeight& w, const std::vector<std::size_t>& indices,
                    XiRule xi) {
    const auto& g = w.grid();
    std::vector<double> part;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= g.size()) throw ShapeMismatch("partial_product: index outside the grid");
        if (k > 0 && indices[k] <= indices[k - 1]) throw ShapeMismatch("partial_product: indices must increase");
        part.push_back(g[indices[k]]);
    }
    return partial_product(f, w, part, xi);
}

Mat partial_product_inverse(const ScalarFn& f, const StieltjesWeight& w, const std::vector<double>& partition,
                            XiRule xi) {
    return product_pair(f, w, partition, xi).inverse;
}

ProductIntegralResult multint_stieltjes(const ScalarFn& f, const StieltjesWeight& w, double tol, int max_levels,
                                        XiRule xi) {
    const double a = w.a(), b = w.b();
    ProductPair next = product_pair(f, w, uniform_partition(a, b, 1), xi);
    double res = 0;
    for (int L = 0; L < max_levels; ++L) {
        ProductPair cur = std::move(next);
        long cells = 1L << L;
        next = product_pair(f, w, uniform_partition(a, b, 2 * cells), xi);
        ProductPair stag = product_pair(f, w, staggered_partition(a, b, cells), xi);
        double scale = std::max({1.0, norm2(next.value), norm2(next.inverse)});
        res = std::max({norm2(next.value - cur.value), norm2(next.inverse - cur.inverse),
                        norm2(next.value - stag.value), norm2(next.inverse - stag.inverse)}) /
              scale;
        if (res <= tol) return {next.value, next.inverse, L, 0, res};
    }
    throw NoConvergence(max_levels, res);
}

namespace {

// Dormand-Prince 5(4) for dW/dt = W M(t) from t0 to t1.
void dopri_segment(const MatFn& M, double t0, double t1, Mat& W, double& h, long& steps, double tol) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
    const long max_steps = 2000000;

    double t = t0;
    if (t1 <= t0) return;
    if (h <= 0) h = (t1 - t0) / 16.0;
    while (t < t1) {
        if (steps > max_steps) throw NoConvergence(0, h);
        bool last = t + h >= t1;
        double hs = last ? t1 - t : h;
        Mat k1 = W * M(t);
        Mat k2 = (W + hs * a21 * k1) * M(t + c2 * hs);
        Mat k3 = (W + hs * (a31 * k1 + a32 * k2)) * M(t + c3 * hs);
        Mat k4 = (W + hs * (a41 * k1 + a42 * k2 + a43 * k3)) * M(t + c4 * hs);
        Mat k5 = (W + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)) * M(t + c5 * hs);
        Mat k6 = (W + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)) * M(t + hs);
        Mat Wn = W + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Mat k7 = Wn * M(t + hs);
        Mat err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = 0;
        for (Eigen::Index i = 0; i < W.size(); ++i) {
            double sc = tol + tol * std::max(std::abs(W(i)), std::abs(Wn(i)));
            double q = std::abs(err(i)) / sc;
            en += q * q;
        }
        en = std::sqrt(en / static_cast<double>(W.size()));
        double fac = en == 0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (en <= 1.0) {
            std::complex<double> det = Wn.determinant();
            if (!std::isfinite(std::abs(det)) || std::abs(det) == 0.0)
                throw NoConvergence(0, std::abs(det));
            W = std::move(Wn);
            t = last ? t1 : t + hs;
            ++steps;
            if (!last) h = hs * fac;
            else h = std::max(h, hs * fac);
        } else {
            h = hs * std::max(0.2, fac);
        }
    }
}

}  // namespace

std::vector<Mat> ode_trajectory(const MatFn& M, double a, const std::vector<double>& times, double tol,
                                Eigen::Index dim) {
    std::vector<Mat> out;
    out.reserve(times.size());
    Mat W = Mat::Identity(dim, dim);
    double t = a, h = 0;
    long steps = 0;
    for (double tt : times) {
        if (tt < t) throw ShapeMismatch("ode_trajectory: times must be ascending and >= a");
        dopri_segment(M, t, tt, W, h, steps, tol);
        t = tt;
        out.push_back(W);
    }
    return out;
}

ProductIntegralResult multint_lebesgue(const MatFn& M, double a, double b, LebesgueMethod method, double tol,
                                       Eigen::Index dim) {
    if (method == LebesgueMethod::Product) {
        ScalarFn one = [](double) { return cplx(1.0); };
        return multint_stieltjes(one, StieltjesWeight::from_density(a, b, M), tol);
    }
    ProductIntegralResult out;
    out.value = Mat::Identity(dim, dim);
    double h = 0;
    dopri_segment(M, a, b, out.value, h, out.steps, tol);
    out.inverse = out.value.inverse();
    return out;
}

double integral_equation_residual(const MatFn& M, double a, double b, double tol, Eigen::Index dim,
                                  int points) {
    std::vector<double> grid = uniform_partition(a, b, points - 1);
    std::vector<double> times;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double lo = grid[k], hh = grid[k + 1] - grid[k];
        times.push_back(lo);
        for (double x : kGLx) times.push_back(lo + 0.5 * hh * (x + 1.0));
    }
    times.push_back(b);
    std::vector<Mat> W = ode_trajectory(M, a, times, tol, dim);

    Mat acc = Mat::Zero(dim, dim);
    double worst = norm2(W[0] - Mat::Identity(dim, dim));
    std::size_t idx = 0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double lo = grid[k], hh = grid[k + 1] - grid[k];
        ++idx;  // grid point itself
        for (std::size_t q = 0; q < kGLx.size(); ++q, ++idx)
            acc += (0.5 * hh * kGLw[q]) * (W[idx] * M(lo + 0.5 * hh * (kGLx[q] + 1.0)));
        worst = std::max(worst, norm2(W[idx] - Mat::Identity(dim, dim) - acc));
    }
    return worst;
}

BoundReport bound_suite(const ScalarFn& f, const StieltjesWeight& w, int level) {
    const Eigen::Index r = w.dim();
    std::vector<double> part = uniform_partition(w.a(), w.b(), 1L << level);
    BoundReport rep;
    Mat W = Mat::Identity(r, r), lin = Mat::Zero(r, r);
    for (std::size_t j = 0; j + 1 < part.size(); ++j) {
        cplx fv = f(0.5 * (part[j] + part[j + 1]));
        Mat dH = w.increment(part[j], part[j + 1]);
        rep.rho += std::abs(fv) * norm2(dH);
        Mat X = fv * dH;
        lin += X;
        W = W * expm_fast(X);
    }
    Mat Id = Mat::Identity(r, r);
    double e = std::exp(rep.rho);
    rep.norm_W = norm2(W);
    rep.slack_norm = e - rep.norm_W;
    rep.slack_unit = rep.rho * e - norm2(W - Id);
    rep.slack_linear = 0.5 * rep.rho * rep.rho * e - norm2(W - Id - lin);
    return rep;
}

SplitInverseResidual split_and_inverse_identities(const ScalarFn& f, const StieltjesWeight& w, double c,
                                                  double tol) {
    if (!(c > w.a() && c < w.b())) throw ShapeMismatch("split_and_inverse_identities: c must be interior");
    ProductIntegralResult whole = multint_stieltjes(f, w, tol);
    ProductIntegralResult left = multint_stieltjes(f, w.restrict(w.a(), c), tol);
    ProductIntegralResult right = multint_stieltjes(f, w.restrict(c, w.b()), tol);
    SplitInverseResidual out;
    out.split = norm2(whole.value - left.value * right.value);
    out.inverse = norm2(whole.value.inverse() - whole.inverse);
    return out;
}

HellyReport helly_harness(const std::vector<ScalarFn>& fs, const std::vector<StieltjesWeight>& ws,
                          const ScalarFn& f, const StieltjesWeight& w, double K, double L, double tol) {
    if (fs.size() != ws.size()) throw ShapeMismatch("helly_harness: sequences differ in length");
    const int probes = 256;
    for (std::size_t n = 0; n < fs.size(); ++n) {
        std::vector<double> pts = uniform_partition(ws[n].a(), ws[n].b(), probes);
        for (double t : pts)
            if (std::abs(fs[n](t)) > K)
                throw HypothesisViolated("helly_harness: |f_" + std::to_string(n) + "| exceeds K");
        if (ws[n].lipschitz_estimate(probes) > L)
            throw HypothesisViolated("helly_harness: H_" + std::to_string(n) + " exceeds Lipschitz bound L");
    }
    Mat limit = multint_stieltjes(f, w, 0.1 * tol).value;
    HellyReport rep;
    for (std::size_t n = 0; n < fs.size(); ++n)
        rep.residuals.push_back(norm2(multint_stieltjes(fs[n], ws[n], 0.1 * tol).value - limit));
    rep.monotone = true;
    for (std::size_t n = 1; n < rep.residuals.size(); ++n)
        if (rep.residuals[n] > rep.residuals[n - 1] + tol) rep.monotone = false;
    rep.converged = !rep.residuals.empty() && rep.residuals.back() <= tol;
    return rep;
}

}  // namespace livsic
