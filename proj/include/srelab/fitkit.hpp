#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace srelab::fitkit {

enum class ModelId { saturation, lorentzian, boundary, custom };

struct FitResult {
    ModelId model_id = ModelId::custom;
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    double r_squared = 0.0;
    Eigen::VectorXd residuals;
    bool converged = false;
    int iterations = 0;
    bool degenerate = false;  // some parameter unidentifiable on this data
    double optimality = 0.0;  // relative max |J^T r| at the solution
    std::string message;
};

struct FitOptions {
    int max_iter = 500;
    double step_tol = 1e-14;
    double gradient_tol = 1e-14;
    double lambda0 = 1e-3;
};

using ModelFunc = std::function<double(double, const Eigen::VectorXd&)>;
using ModelJac = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Damped Gauss-Newton (Levenberg style) with parameter scaling by initial
// magnitudes. jac may be empty, in which case central differences are used.
// sigma, when given, supplies per-point standard errors (weighted residuals).
FitResult fit_levenberg(const ModelFunc& f, const ModelJac& jac, const std::vector<double>& x,
                        const std::vector<double>& y, const std::vector<double>* sigma,
                        const Eigen::VectorXd& p0, const FitOptions& opts = {});

using Points = std::vector<std::pair<double, double>>;

// m2/N = ln 2 - a e^{-b J t};  requires >= 4 points
FitResult fit_saturation(const Points& points, double j = 1.0, const FitOptions& opts = {});

// m2/N = a + b / (c + J^2 t^2);  requires >= 4 points
FitResult fit_lorentzian(const Points& points, double j = 1.0, const FitOptions& opts = {});

// beta J = a + b / (c + J^2 t*^2), points are (t*, beta J);  requires >= 3 points
FitResult fit_boundary(const Points& points, double j = 1.0, const FitOptions& opts = {});

}  // namespace srelab::fitkit
