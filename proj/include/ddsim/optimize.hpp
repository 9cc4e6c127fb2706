// Derivative-free Nelder-Mead minimisation

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ddsim {

struct NelderMeadOptions {
    int max_evals{4000};
    double xtol{1e-13};  // simplex diameter
    double ftol{0.0};    // absolute spread of vertex values
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f{0.0};
    int evals{0};
};

// Standard coefficients (1, 2, 1/2, 1/2); initial simplex x0 + step_i e_i.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const NelderMeadOptions& opt = {});

} // namespace ddsim
