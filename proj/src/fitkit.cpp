#include "srelab/fitkit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace srelab::fitkit {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void residuals_of(const ModelFunc& f, const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>* sigma, const Eigen::VectorXd& p,
                  Eigen::VectorXd& r) {
    const int n = static_cast<int>(x.size());
    r.resize(n);
    for (int i = 0; i < n; ++i) {
        double ri = f(x[i], p) - y[i];
        if (sigma) ri /= (*sigma)[i];
        r[i] = ri;
    }
}

void jacobian_of(const ModelFunc& f, const ModelJac& jac, const std::vector<double>& x,
                 const std::vector<double>* sigma, const Eigen::VectorXd& p, Eigen::MatrixXd& jm) {
    const int n = static_cast<int>(x.size());
    const int k = static_cast<int>(p.size());
    jm.resize(n, k);
    Eigen::VectorXd row(k);
    if (jac) {
        for (int i = 0; i < n; ++i) {
            jac(x[i], p, row);
            jm.row(i) = row;
        }
    } else {
        for (int j = 0; j < k; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(p[j]));
            Eigen::VectorXd pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            for (int i = 0; i < n; ++i) jm(i, j) = (f(x[i], pp) - f(x[i], pm)) / (2 * h);
        }
    }
    if (sigma)
        for (int i = 0; i < n; ++i) jm.row(i) /= (*sigma)[i];
}

}  // namespace

FitResult fit_levenberg(const ModelFunc& f, const ModelJac& jac, const std::vector<double>& x,
                        const std::vector<double>& y, const std::vector<double>* sigma,
                        const Eigen::VectorXd& p0, const FitOptions& opts) {
    if (x.size() != y.size()) throw std::invalid_argument("fit: x/y size mismatch");
    const int n = static_cast<int>(x.size());
    const int k = static_cast<int>(p0.size());
    if (n < k) throw std::invalid_argument("fit refused: fewer points than parameters");
    if (k > 4) throw std::invalid_argument("fit: at most 4 parameters supported");

    Eigen::VectorXd scale(k);
    for (int j = 0; j < k; ++j) scale[j] = std::max(std::abs(p0[j]), 1e-8);

    Eigen::VectorXd p = p0, r, r_try;
    Eigen::MatrixXd jm;
    residuals_of(f, x, y, sigma, p, r);
    double ssr = r.squaredNorm();
    double lambda = opts.lambda0;

    FitResult out;
    int it = 0;
    for (it = 1; it <= opts.max_iter; ++it) {
        jacobian_of(f, jac, x, sigma, p, jm);
        // scaled normal equations
        Eigen::MatrixXd js = jm * scale.asDiagonal();
        Eigen::MatrixXd a = js.transpose() * js;
        Eigen::VectorXd g = js.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < opts.gradient_tol * std::max(1.0, std::sqrt(ssr))) {
            out.converged = true;
            break;
        }
        Eigen::MatrixXd a_damped = a;
        for (int j = 0; j < k; ++j) a_damped(j, j) += lambda * std::max(a(j, j), 1e-30);
        Eigen::VectorXd du = a_damped.ldlt().solve(-g);
        Eigen::VectorXd p_try = p + scale.asDiagonal() * du;
        residuals_of(f, x, y, sigma, p_try, r_try);
        const double ssr_try = r_try.squaredNorm();
        if (ssr_try < ssr) {
            const double rel_step = du.lpNorm<Eigen::Infinity>();
            p = p_try;
            r = r_try;
            ssr = ssr_try;
            lambda = std::max(lambda * 0.3, 1e-14);
            if (rel_step < opts.step_tol) {
                out.converged = true;
                break;
            }
        } else {
            lambda *= 2.0;
            if (lambda > 1e14) {
                out.converged = true;  // stuck at a (possibly flat) minimum
                break;
            }
        }
    }

    out.params = p;
    out.residuals = r;
    out.iterations = it;

    jacobian_of(f, jac, x, sigma, p, jm);
    Eigen::VectorXd g = jm.transpose() * r;
    double jscale = 0.0;
    for (int j = 0; j < k; ++j) jscale = std::max(jscale, jm.col(j).norm());
    out.optimality =
        g.lpNorm<Eigen::Infinity>() / std::max(1e-30, jscale * std::max(std::sqrt(ssr), 1e-12));

    // covariance = s^2 (J^T J)^{-1}; flag near-singular information matrices
    Eigen::MatrixXd a = jm.transpose() * jm;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    out.degenerate = !(emin > 0.0) || emax / std::max(emin, 1e-300) > 1e12;
    const double s2 = n > k ? ssr / (n - k) : 0.0;
    if (!out.degenerate) {
        out.covariance = s2 * a.inverse();
    } else {
        out.covariance = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
        out.message = "information matrix near-singular: some parameter unidentifiable";
    }

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double sst = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = y[i] - mean;
        if (sigma) d /= (*sigma)[i];
        sst += d * d;
    }
    if (sst > 0.0)
        out.r_squared = 1.0 - ssr / sst;
    else
        out.r_squared = ssr <= 1e-24 ? 1.0 : -std::numeric_limits<double>::infinity();
    return out;
}

FitResult fit_saturation(const Points& points, double j, const FitOptions& opts) {
    if (points.size() < 4) throw std::invalid_argument("fit_saturation requires >= 4 points");
    std::vector<double> x, y;
    for (auto& p : points) {
        x.push_back(p.first);
        y.push_back(p.second);
    }
    ModelFunc f = [j](double t, const Eigen::VectorXd& p) {
        return kLn2 - p[0] * std::exp(-p[1] * j * t);
    };
    ModelJac jac = [j](double t, const Eigen::VectorXd& p, Eigen::VectorXd& out) {
        const double e = std::exp(-p[1] * j * t);
        out[0] = -e;
        out[1] = p[0] * j * t * e;
    };
    Eigen::VectorXd p0(2);
    p0 << kLn2 - y.front(), 1.0;
    FitResult r = fit_levenberg(f, jac, x, y, nullptr, p0, opts);
    r.model_id = ModelId::saturation;
    return r;
}

namespace {

FitResult fit_inverse_quadratic(const Points& points, double j, const FitOptions& opts,
                                ModelId id) {
    std::vector<double> x, y;
    for (auto& p : points) {
        x.push_back(p.first);
        y.push_back(p.second);
    }
    ModelFunc f = [j](double t, const Eigen::VectorXd& p) {
        return p[0] + p[1] / (p[2] + j * j * t * t);
    };
    ModelJac jac = [j](double t, const Eigen::VectorXd& p, Eigen::VectorXd& out) {
        const double d = p[2] + j * j * t * t;
        out[0] = 1.0;
        out[1] = 1.0 / d;
        out[2] = -p[1] / (d * d);
    };
    // endpoint-based initial guess: a from the large-t end, b/c from the first point
    const double a0 = y.back();
    const double c0 = 1.0;
    const double b0 = (y.front() - a0) * (c0 + j * j * x.front() * x.front());
    Eigen::VectorXd p0(3);
    p0 << a0, (b0 == 0.0 ? 0.1 : b0), c0;
    FitResult r = fit_levenberg(f, jac, x, y, nullptr, p0, opts);
    r.model_id = id;
    return r;
}

}  // namespace

FitResult fit_lorentzian(const Points& points, double j, const FitOptions& opts) {
    if (points.size() < 4) throw std::invalid_argument("fit_lorentzian requires >= 4 points");
    return fit_inverse_quadratic(points, j, opts, ModelId::lorentzian);
}

FitResult fit_boundary(const Points& points, double j, const FitOptions& opts) {
    if (points.size() < 3) throw std::invalid_argument("fit_boundary requires >= 3 points");
    return fit_inverse_quadratic(points, j, opts, ModelId::boundary);
}

}  // namespace srelab::fitkit
