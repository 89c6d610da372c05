#include "swarmopt/pgd.hpp"

#include <algorithm>
#include <cmath>

namespace swarmopt {

void SolverConfig::validate_or_throw() const {
    if (max_inner_iters < 1) throw Error("SolverConfig: max_inner_iters must be >= 1");
    if (!(step_init > 0.0)) throw Error("SolverConfig: step_init must be > 0");
    if (!(step_max > 0.0)) throw Error("SolverConfig: step_max must be > 0");
    if (!(step_min > 0.0)) throw Error("SolverConfig: step_min must be > 0");
    if (!(step_max >= step_min)) throw Error("SolverConfig: step_max must be >= step_min");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw Error("SolverConfig: backtrack must be in (0,1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error("SolverConfig: armijo_c must be in (0,1)");
    if (!(grad_tol > 0.0)) throw Error("SolverConfig: grad_tol must be > 0");
    if (!(fd_epsilon > 0.0)) throw Error("SolverConfig: fd_epsilon must be > 0");
}

PgdResult minimize_projected(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& gradient,
    const std::function<void(Eigen::VectorXd&)>& project, Eigen::VectorXd x0,
    const SolverConfig& cfg) {
    cfg.validate_or_throw();

    project(x0);
    Eigen::VectorXd x = std::move(x0);

    double f = objective(x);
    if (std::isnan(f)) throw NonFiniteError("pgd: objective is NaN at the start point");

    Eigen::VectorXd g(x.size());
    gradient(x, g);
    if (!g.allFinite()) throw NonFiniteError("pgd: non-finite gradient at the start point");

    PgdResult res;
    res.iterations = 0;
    double alpha = cfg.step_init;
    Eigen::VectorXd probe(x.size()), cand(x.size()), g_new(x.size());

    for (int iter = 0; iter < cfg.max_inner_iters; ++iter) {
        // Fixed-point test: a unit projected-gradient step that goes nowhere
        // means x already satisfies the first-order conditions on the set.
        probe = x - g;
        project(probe);
        res.step_norm = (probe - x).norm();
        if (res.step_norm <= cfg.grad_tol) {
            res.converged = true;
            break;
        }

        // Armijo backtracking along the projected-arc trial points.
        double a = std::clamp(alpha, cfg.step_min, cfg.step_max);
        bool accepted = false;
        double f_cand = f;
        while (a >= cfg.step_min) {
            cand = x - a * g;
            project(cand);
            const double decrease = g.dot(cand - x);
            f_cand = objective(cand);
            if (std::isfinite(f_cand) && decrease <= 0.0 &&
                f_cand <= f + cfg.armijo_c * decrease) {
                accepted = true;
                break;
            }
            a *= cfg.backtrack;
        }
        if (!accepted) break;  // no acceptable step left; return the best point so far

        gradient(cand, g_new);
        if (!g_new.allFinite()) throw NonFiniteError("pgd: non-finite gradient at an accepted point");

        // Barzilai-Borwein (s's/s'y) seed for the next trial step.
        const Eigen::VectorXd s = cand - x;
        const double sy = s.dot(g_new - g);
        alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, cfg.step_min, cfg.step_max)
                         : cfg.step_max;

        x.swap(cand);
        g.swap(g_new);
        f = f_cand;
        res.iterations = iter + 1;
    }

    res.x = std::move(x);
    res.objective = f;
    return res;
}

}  // namespace swarmopt
