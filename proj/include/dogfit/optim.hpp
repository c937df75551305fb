#pragma once

// Adam over named parameter groups with per-group learning rates and the
// two-breakpoint step decay schedule.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dogfit/ad.hpp"

namespace dogfit {

struct ParamGroup {
    std::string name;
    std::vector<double> values;
    double rate = 0.0;
    bool trainable = true;
};

// Step decay: x1 until 75% of the budget, x0.3 until 93.75%, x0.09 after.
inline double lr_multiplier(int step, int total_steps) {
    if (total_steps < 1) throw std::invalid_argument("lr_multiplier: total_steps must be >= 1");
    if (step < 0 || step >= total_steps)
        throw std::invalid_argument("lr_multiplier: require 0 <= step < total_steps");
    const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
    if (frac < 0.75) return 1.0;
    if (frac < 0.9375) return 0.3;
    return 0.09;
}

class AdamOptimizer {
public:
    AdamOptimizer(const std::vector<ParamGroup>& groups, int total_steps, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8)
        : total_steps_(total_steps), beta1_(beta1), beta2_(beta2), eps_(eps) {
        if (total_steps < 1) throw std::invalid_argument("AdamOptimizer: total_steps must be >= 1");
        m_.resize(groups.size());
        v_.resize(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g) {
            m_[g].assign(groups[g].values.size(), 0.0);
            v_[g].assign(groups[g].values.size(), 0.0);
        }
    }

    int step_index() const { return step_; }

    void step(std::vector<ParamGroup>& groups, const std::vector<std::vector<double>>& grads) {
        if (grads.size() != groups.size())
            throw std::invalid_argument("AdamOptimizer: gradient group count mismatch");
        const double sched = lr_multiplier(step_, total_steps_);
        const int t = step_ + 1;
        const double bc1 = 1.0 - std::pow(beta1_, t);
        const double bc2 = 1.0 - std::pow(beta2_, t);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            ParamGroup& pg = groups[g];
            if (!pg.trainable || pg.rate <= 0.0) continue;
            const double lr = pg.rate * sched;
            for (std::size_t i = 0; i < pg.values.size(); ++i) {
                const double grad = grads[g][i];
                m_[g][i] = beta1_ * m_[g][i] + (1.0 - beta1_) * grad;
                v_[g][i] = beta2_ * v_[g][i] + (1.0 - beta2_) * grad * grad;
                const double mhat = m_[g][i] / bc1;
                const double vhat = v_[g][i] / bc2;
                pg.values[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
            }
        }
        ++step_;
    }

private:
    int total_steps_;
    double beta1_, beta2_, eps_;
    int step_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

// Evaluates f on tape leaves for the trainable groups (frozen groups enter as
// constants and receive zero gradient) and returns (value, per-group grads).
template <class F>
std::pair<double, std::vector<std::vector<double>>> gradient(F&& f,
                                                             const std::vector<ParamGroup>& groups) {
    // persistent per-thread tape + adjoint buffer: the node vector keeps its
    // capacity between steps, which avoids reallocating the whole tape every
    // optimizer iteration
    static thread_local ad::Tape tape;
    static thread_local std::vector<double> adj;
    tape.clear();
    ad::ScopedTape scope(&tape);
    std::vector<std::vector<ad::Var>> vars(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        vars[g].reserve(groups[g].values.size());
        for (double v : groups[g].values) {
            if (groups[g].trainable && groups[g].rate > 0.0)
                vars[g].push_back(ad::Var::leaf(v));
            else
                vars[g].push_back(ad::Var(v));
        }
    }
    const ad::Var loss = f(vars);
    std::vector<std::vector<double>> grads(groups.size());
    if (std::isfinite(loss.v))
        tape.backward_into(loss.idx, adj);
    else
        adj.assign(tape.size(), 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        grads[g].assign(groups[g].values.size(), 0.0);
        for (std::size_t i = 0; i < vars[g].size(); ++i)
            if (vars[g][i].idx >= 0) grads[g][i] = adj[static_cast<std::size_t>(vars[g][i].idx)];
    }
    return {loss.v, std::move(grads)};
}

}  // namespace dogfit
