#include "curvecast/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "curvecast/errors.hpp"

namespace curvecast {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double initial_step,
                             int max_evaluations, double tolerance) {
    const Eigen::Index dim = x0.size();
    if (dim == 0) {
        return NelderMeadResult{x0, f(x0), 1};
    }

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> values;
    simplex.reserve(dim + 1);
    simplex.push_back(x0);
    values.push_back(eval(x0));
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::VectorXd v = x0;
        v(i) += initial_step;
        simplex.push_back(v);
        values.push_back(eval(v));
    }

    std::vector<std::size_t> order(dim + 1);
    while (evals < max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim];

        if (std::abs(values[worst] - values[best]) <=
            tolerance * (std::abs(values[best]) + tolerance)) {
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t idx : order) {
            if (idx != worst) centroid += simplex[idx];
        }
        centroid /= static_cast<double>(dim);

        Eigen::VectorXd reflected = centroid + alpha * (centroid - simplex[worst]);
        const double fr = eval(reflected);
        if (fr < values[best]) {
            Eigen::VectorXd expanded = centroid + gamma * (reflected - centroid);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if (fr < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            Eigen::VectorXd contracted = centroid + rho * (simplex[worst] - centroid);
            const double fc = eval(contracted);
            if (fc < values[worst]) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                for (std::size_t idx : order) {
                    if (idx == best) continue;
                    simplex[idx] = simplex[best] + sigma * (simplex[idx] - simplex[best]);
                    values[idx] = eval(simplex[idx]);
                }
            }
        }
    }

    const std::size_t best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    return NelderMeadResult{simplex[best], values[best], evals};
}

GoldenSectionResult golden_section(const std::function<double(double)>& f,
                                   double lo, double hi, double width_tolerance,
                                   int max_evaluations) {
    if (!(lo < hi)) {
        throw ContractError("golden_section: invalid interval");
    }
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;

    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    int evals = 0;
    auto eval = [&](double x) {
        ++evals;
        return f(x);
    };
    double fc = eval(c);
    double fd = eval(d);
    const double first = fc;
    bool flat = (fc == fd);

    while ((b - a) > width_tolerance && evals < max_evaluations) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = eval(d);
        }
        if (fc != first || fd != first) flat = false;
    }

    GoldenSectionResult result;
    result.evaluations = evals;
    if (flat) {
        result.flat = true;
        result.x = 0.5 * (lo + hi);
        result.value = first;
        return result;
    }
    if (fc < fd) {
        result.x = c;
        result.value = fc;
    } else {
        result.x = d;
        result.value = fd;
    }
    return result;
}

}  // namespace curvecast
