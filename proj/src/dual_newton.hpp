// Shared damped-Newton engine for the moment-matching duals.
//
// Both duals (Hellinger and KL weights) are strictly convex on the cone of
// grid-positive omega polynomials, but their minimizers can sit close to the
// cone boundary when the target moments are hard for the reference density
// (high order, strong skew), and far-tail quadrature nodes, where the
// reference has underflowed, carry barriers too weak to repel descent
// trajectories: plain damped Newton either crawls or wanders into spurious
// "atom" channels that the true optimum does not occupy.
//
// The engine therefore follows a homotopy in the moment vector on a *core*
// grid truncated where the reference still has numerically meaningful mass:
//
//     mu(s) = (1 - s) * (grid moments of r) + s * mu_target,  s: 0 -> 1.
//
// Every point of the segment has a positive definite Hankel matrix, the
// feasible cone does not depend on the moments, and s = 0 is solved exactly
// by the initial iterate, so warm-started stages stay inside the Newton
// basin. A final warm-started descent on the caller's grid then enforces the
// contract tolerances; the core optimum enters it already nearly stationary.
//
// Objective and gradient sums are accumulated in long double: the stopping
// tolerance (1e-9 on the caller-basis gradient) sits near the double
// round-off floor of 640-node sums with O(10) integrand values.
//
// The Table type supplies the discretized functional in a prior-standardized
// internal basis (see the solver sources):
//   int order;  std::vector<double> tmu;
//   std::vector<double> initial() const;        exact optimum for r-moments
//   std::vector<double> r_moments() const;      grid moments of r
//   bool interior(bt, eps) const;
//   double objective(bt, mu) const;
//   Eigen::VectorXd gradient(bt, mu) const;
//   Eigen::MatrixXd hessian(bt) const;
//   Eigen::MatrixXd basis_map;                  t-residuals -> caller basis

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <Eigen/Dense>

#include "momdens/errors.hpp"
#include "momdens/hellinger.hpp"

namespace momdens::detail {

struct NewtonState {
    std::vector<double> bt;
    int iterations_total = 0;
    bool converged = false;
    Eigen::VectorXd gradient_x;
    double objective = 0.0;
    std::vector<double> trace;  // accepted objectives of the last stage
};

enum class StageStop { CallerBasis, InternalBasis };

// One damped-Newton descent for a fixed moment vector. Levenberg damping is
// escalated whenever backtracking cannot find an acceptable step. Returns
// true when the stage tolerance was reached within its budget.
template <class Table>
bool newton_stage(const Table& table, const std::vector<double>& mu, double eps,
                  StageStop mode, double tol_grad, double tol_mom,
                  const std::vector<double>& mu_for_tol, int budget,
                  int max_total, const SolveOptions& opts, NewtonState& state,
                  bool bail_when_slow = false) {
    const int dim = table.order + 1;

    // A start outside the cone (e.g. a core-grid iterate probed on the full
    // grid while its far-tail omega is still negative) cannot be descended
    // from; fail in one pass instead of grinding through the damping ladder.
    // Tiny positive dips are allowed: a bold first step can lift them.
    if (!table.interior(state.bt, 1e-300))
        return false;

    state.trace.clear();
    double objective = table.objective(state.bt, mu);
    state.trace.push_back(objective);

    Eigen::VectorXd g = table.gradient(state.bt, mu);
    // The gradient is the moment-residual vector, so both stopping tests are
    // per-order relative: a residual on mu_6 ~ 30 is not comparable to one
    // on mu_0 = 1.
    auto converged = [&]() {
        if (mode == StageStop::InternalBasis)
            return g.lpNorm<Eigen::Infinity>() <= tol_grad;
        const Eigen::VectorXd g_x = table.basis_map * g;
        double max_rel = 0.0;
        for (int k = 0; k < dim; ++k)
            max_rel = std::max(max_rel, std::abs(g_x[k]) /
                                            std::max(1.0, std::abs(mu_for_tol[k])));
        return max_rel <= tol_grad && max_rel <= tol_mom;
    };

    double lambda = 0.0;
    int used = 0;
    bool done = converged();
    const double initial_norm = g.lpNorm<Eigen::Infinity>();
    std::vector<double> candidate(dim);
    while (!done && used < budget && state.iterations_total < max_total) {
        if (!g.allFinite())
            return false;
        // A warm-started homotopy stage that has not contracted after a few
        // steps overshot its basin; giving up early lets the caller halve
        // the continuation step instead.
        if (bail_when_slow && used >= 14 &&
            g.lpNorm<Eigen::Infinity>() > 0.5 * initial_norm)
            break;
        const Eigen::MatrixXd h = table.hessian(state.bt);
        if (!h.allFinite())
            return false;
        const double lambda_seed = 1e-10 * h.trace() / dim;

        // The step equation is factorized in long double: near sharp omega
        // dips the Hessian condition number eats most of a double's digits.
        using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
        const LongMatrix h_long = h.cast<long double>();
        const LongVector g_long = g.cast<long double>();

        bool accepted = false;
        double candidate_objective = 0.0;
        int escalations = 0;
        while (!accepted) {
            if (++escalations > 60)
                return false;
            LongMatrix damped = h_long;
            damped.diagonal().array() += static_cast<long double>(lambda);
            Eigen::LLT<LongMatrix> llt(damped);
            if (llt.info() != Eigen::Success) {
                lambda = std::max(lambda * 10.0, lambda_seed);
                if (!(lambda <= 1e30))
                    return false;
                continue;
            }
            const Eigen::VectorXd step = llt.solve(-g_long).cast<double>();
            const double slope = g.dot(step);
            if (!std::isfinite(slope)) {
                lambda = std::max(lambda * 10.0, lambda_seed);
                if (!(lambda <= 1e30))
                    return false;
                continue;
            }

            double alpha = 1.0;
            for (int halvings = 0; halvings < 40; ++halvings) {
                for (int k = 0; k < dim; ++k)
                    candidate[k] = state.bt[k] + alpha * step[k];
                if (table.interior(candidate, eps)) {
                    // Near the optimum the remaining objective excess sits
                    // below the round-off floor, so Armijo can no longer see
                    // progress; a full Newton step is accepted on gradient
                    // contraction instead.
                    if (alpha == 1.0 && g.lpNorm<Eigen::Infinity>() < 1e-4) {
                        const Eigen::VectorXd g_candidate =
                            table.gradient(candidate, mu);
                        if (g_candidate.lpNorm<Eigen::Infinity>() <
                            0.99 * g.lpNorm<Eigen::Infinity>()) {
                            candidate_objective = table.objective(candidate, mu);
                            accepted = true;
                            break;
                        }
                    }
                    candidate_objective = table.objective(candidate, mu);
                    // The last term absorbs round-off once objective
                    // differences reach the noise floor.
                    if (candidate_objective <=
                        objective + opts.armijo * alpha * slope +
                            4e-16 * std::abs(objective)) {
                        accepted = true;
                        break;
                    }
                }
                alpha *= opts.ls_shrink;
            }
            if (!accepted) {
                lambda = (lambda == 0.0) ? lambda_seed : lambda * 10.0;
                if (lambda > 1e30)
                    return false;
            }
        }
        static const bool debug_iter = std::getenv("MOMDENS_DEBUG2") != nullptr;
        if (debug_iter)
            std::fprintf(stderr, "      it=%d |g|=%.3e lam=%.2e obj=%.12g\n",
                         used, g.lpNorm<Eigen::Infinity>(), lambda,
                         candidate_objective);

        lambda *= 0.1;
        if (lambda < lambda_seed)
            lambda = 0.0;

        state.bt = candidate;
        objective = candidate_objective;
        state.trace.push_back(objective);
        ++used;
        ++state.iterations_total;
        g = table.gradient(state.bt, mu);
        done = converged();
    }

    state.objective = table.objective(state.bt, mu);
    state.gradient_x = table.basis_map * g;
    state.converged = done;
    static const bool debug = std::getenv("MOMDENS_DEBUG") != nullptr;
    if (debug)
        std::fprintf(stderr,
                     "    stage mode=%d used=%d total=%d g_int=%.2e g_x=%.2e done=%d\n",
                     int(mode), used, state.iterations_total,
                     g.lpNorm<Eigen::Infinity>(),
                     state.gradient_x.lpNorm<Eigen::Infinity>(), int(done));
    return done;
}

template <class Table>
NewtonState minimize_dual(const Table& full, const Table& core,
                          const SolveOptions& opts,
                          const std::vector<double>* warm_start_bt = nullptr) {
    NewtonState state;

    // A caller-provided warm start is trusted to be near the optimum; try a
    // direct descent before falling back to the homotopy.
    if (warm_start_bt) {
        state.bt = *warm_start_bt;
        if (newton_stage(full, full.tmu, opts.eps_feas, StageStop::CallerBasis,
                         opts.tol_grad, opts.tol_mom, full.tmu, opts.max_iter,
                         opts.max_iter, opts, state))
            return state;
    }

    // Homotopy along the moment segment on the core grid. The path only
    // has to deliver a warm start inside the finishing descent's basin, so
    // the full-grid finish is probed at progress milestones instead of
    // requiring the path to reach s = 1 at stage tolerance.
    const std::vector<double> mu0 = core.r_moments();
    const int dim = core.order + 1;
    const int homotopy_cap = std::max(opts.max_iter - 40, opts.max_iter / 2);
    std::vector<double> mu_stage(dim);
    std::vector<double> bt_good = core.initial();
    double s = 0.0;
    double ds = 0.25;
    double next_probe = 0.7;
    int attempts = 0;
    while (s < 1.0 && state.iterations_total < homotopy_cap &&
           ++attempts < 400) {
        const double s_next = std::min(1.0, s + ds);
        for (int k = 0; k < dim; ++k)
            mu_stage[k] = (1.0 - s_next) * mu0[k] + s_next * core.tmu[k];

        state.bt = bt_good;
        const int before = state.iterations_total;
        const bool ok = newton_stage(core, mu_stage, 1e-12,
                                     StageStop::InternalBasis,
                                     s_next >= 1.0 ? 1e-8 : 1e-5, 0.0, core.tmu,
                                     25, homotopy_cap, opts, state,
                                     /*bail_when_slow=*/true);
        const int used_here = state.iterations_total - before;
        static const bool debug_path = std::getenv("MOMDENS_DEBUG") != nullptr;
        if (debug_path)
            std::fprintf(stderr, "  s=%.5f ds=%.5f used=%d ok=%d total=%d\n",
                         s_next, ds, used_here, int(ok),
                         state.iterations_total);
        if (ok) {
            s = s_next;
            bt_good = state.bt;
            // Only accelerate when the stage was easy; regrowing after every
            // success ping-pongs against the next failure.
            if (used_here <= 5)
                ds = std::min(0.5, ds * 1.5);
        } else {
            ds *= 0.5;
            if (ds < 1e-5)
                break;
        }

        if (s >= next_probe || s >= 1.0) {
            next_probe += 0.15;
            state.bt = bt_good;
            if (newton_stage(full, full.tmu, opts.eps_feas,
                             StageStop::CallerBasis, opts.tol_grad,
                             opts.tol_mom, full.tmu, 40, opts.max_iter, opts,
                             state))
                return state;
        }
    }
    state.bt = bt_good;

    // Last chance with whatever budget remains.
    newton_stage(full, full.tmu, opts.eps_feas, StageStop::CallerBasis,
                 opts.tol_grad, opts.tol_mom, full.tmu, opts.max_iter,
                 opts.max_iter, opts, state);
    return state;
}

}  // namespace momdens::detail
