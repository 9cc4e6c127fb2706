#include "ddsim/optimize.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace ddsim {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const NelderMeadOptions& opt)
{
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        return f(x);
    };
    for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += step(i);
    for (Eigen::Index i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<int> order(n + 1);
    while (evals < opt.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order.front(), worst = order.back(), second = order[n - 1];

        double diam = 0.0;
        for (Eigen::Index i = 0; i <= n; ++i) diam = std::max(diam, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
        if (diam < opt.xtol || vals[worst] - vals[best] < opt.ftol) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i <= n; ++i) {
            if (i != worst) centroid += pts[i];
        }
        centroid /= double(n);

        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        // contraction, outside if the reflection improved on the worst vertex
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                           : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (Eigen::Index i = 0; i <= n; ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    return {pts[std::size_t(it - vals.begin())], *it, evals};
}

} // namespace ddsim
