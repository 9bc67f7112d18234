// optimize.hpp — BFGS quasi-Newton local search with central-difference
// gradients and deterministic multi-restart

#pragma once

#include "qss/linalg.hpp"

#include <atomic>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qss {

struct OptimizerConfig {
    std::string method = "bfgs";
    double grad_step = 1e-6;   // central-difference step per parameter
    double obj_tol = 1e-14;    // stop once accepted decreases fall below this
    double grad_tol = 1e-8;    // stop once ||grad||_inf falls below this
    int max_iters = 2000;
    int restarts = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (method != "bfgs") throw std::invalid_argument("OptimizerConfig: unknown method tag");
        if (grad_step <= 0 || obj_tol <= 0 || grad_tol <= 0)
            throw std::invalid_argument("OptimizerConfig: tolerances and step must be positive");
        if (max_iters <= 0 || restarts <= 0)
            throw std::invalid_argument("OptimizerConfig: iteration and restart counts must be positive");
    }
};

using ObjectiveFn  = std::function<double(const RealVector&)>;
using GradientFn   = std::function<RealVector(const RealVector&)>;
using InitSampler  = std::function<RealVector(std::mt19937_64&)>;

inline GradientFn central_difference_gradient(ObjectiveFn f, double step) {
    return [f = std::move(f), step](const RealVector& x) {
        RealVector g(x.size());
        RealVector xp = x;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double xi = x(i);
            xp(i) = xi + step;
            const double fp = f(xp);
            xp(i) = xi - step;
            const double fm = f(xp);
            xp(i) = xi;
            g(i) = (fp - fm) / (2.0 * step);
        }
        return g;
    };
}

struct MinimizeResult {
    RealVector x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // accepted objective values, x0 first
};

// BFGS with inverse-Hessian updates and Armijo backtracking. Accepted steps
// strictly decrease the objective, so the trace is non-increasing.
inline MinimizeResult bfgs_minimize(const ObjectiveFn& f, const GradientFn& grad,
                                    RealVector x, const OptimizerConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = x.size();
    const double armijo = 1e-4;

    double fx = f(x);
    RealVector g = grad(x);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    bool hinv_is_identity = true;
    bool first_update = true;

    MinimizeResult result;
    result.trace.push_back(fx);

    int stalls = 0;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
            result.converged = true;
            break;
        }

        RealVector p = hinv_is_identity
                           ? RealVector(-g)
                           : RealVector(-(hinv.selfadjointView<Eigen::Lower>() * g));
        double slope = g.dot(p);
        if (!(slope < 0)) {  // lost descent direction: fall back to steepest descent
            hinv.setIdentity();
            hinv_is_identity = true;
            p = -g;
            slope = g.dot(p);
        }

        double t = 1.0;
        double fn = 0.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            t = 1.0;
            for (int ls = 0; ls < 60; ++ls) {
                fn = f(x + t * p);
                if (fn <= fx + armijo * t * slope) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted && !hinv_is_identity) {  // retry once along -g
                hinv.setIdentity();
                hinv_is_identity = true;
                first_update = true;
                p = -g;
                slope = g.dot(p);
            } else {
                break;
            }
        }
        if (!accepted) break;  // flat to line-search resolution

        const RealVector s = t * p;
        const RealVector xn = x + s;
        const RealVector gn = grad(xn);
        const RealVector y = gn - g;
        const double sy = s.dot(y);

        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (first_update) {
                const double yy = y.squaredNorm();
                if (yy > 0) {
                    hinv = (sy / yy) * Eigen::MatrixXd::Identity(n, n);
                    hinv_is_identity = false;
                }
                first_update = false;
            }
            const RealVector hy = hinv.selfadjointView<Eigen::Lower>() * y;
            const double yhy = y.dot(hy);
            hinv.selfadjointView<Eigen::Lower>().rankUpdate(s, (sy + yhy) / (sy * sy));
            hinv.selfadjointView<Eigen::Lower>().rankUpdate(hy, s, -1.0 / sy);
            hinv_is_identity = false;
        }

        const double improvement = fx - fn;
        x = xn;
        fx = fn;
        g = gn;
        result.trace.push_back(fx);
        ++result.iterations;

        if (improvement <= cfg.obj_tol) {
            if (++stalls >= 6) {
                result.converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }

    result.x = std::move(x);
    result.value = fx;
    return result;
}

struct RestartOutcome {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct MultiRestartResult {
    MinimizeResult best;
    int best_restart = -1;
    bool any_converged = false;
    std::vector<RestartOutcome> outcomes;

    int total_iterations() const {
        int n = 0;
        for (const auto& o : outcomes) n += o.iterations;
        return n;
    }
};

// Independent restarts with per-restart RNG streams keyed by (seed, index):
// results are schedule-independent (restarts run concurrently, the reduction
// below is ordered), and the best over the first k restarts is a
// prefix-stable function of k.
inline MultiRestartResult multi_restart_minimize(const ObjectiveFn& f, const GradientFn& grad,
                                                 const InitSampler& init, int restarts,
                                                 std::uint64_t seed, const OptimizerConfig& cfg) {
    if (restarts < 1) throw std::invalid_argument("multi_restart_minimize: restarts must be positive");
    cfg.validate();

    std::vector<MinimizeResult> results(static_cast<std::size_t>(restarts));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&]() {
        for (int r = next.fetch_add(1); r < restarts; r = next.fetch_add(1)) {
            try {
                std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
                results[static_cast<std::size_t>(r)] = bfgs_minimize(f, grad, init(rng), cfg);
            } catch (...) {
                const std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(restarts));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    MultiRestartResult out;
    for (int r = 0; r < restarts; ++r) {
        MinimizeResult& res = results[static_cast<std::size_t>(r)];
        out.outcomes.push_back({res.value, res.converged, res.iterations});
        out.any_converged = out.any_converged || res.converged;
        if (out.best_restart < 0 || res.value < out.best.value) {
            out.best = std::move(res);
            out.best_restart = r;
        }
    }
    return out;
}

} // namespace qss
