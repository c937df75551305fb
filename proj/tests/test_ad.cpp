#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dogfit/ad.hpp"

using dogfit::ad::ScopedTape;
using dogfit::ad::Tape;
using dogfit::ad::Var;

namespace {

// Central finite difference of a scalar function of n variables.
template <class F>
std::vector<double> fd_gradient(F f, std::vector<double> x, double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x[i]));
        const double x0 = x[i];
        x[i] = x0 + step;
        const double fp = f(x);
        x[i] = x0 - step;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

template <class F>
std::vector<double> tape_gradient(F f, const std::vector<double>& x) {
    Tape tape;
    ScopedTape scope(&tape);
    std::vector<Var> vars;
    vars.reserve(x.size());
    for (double v : x) vars.push_back(Var::leaf(v));
    const Var y = f(vars);
    const std::vector<double> adj = tape.backward(y.idx);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = vars[i].idx >= 0 ? adj[static_cast<std::size_t>(vars[i].idx)] : 0.0;
    return g;
}

}  // namespace

TEST_CASE("squared norm gradient") {
    auto f = [](const auto& v) { return v[0] * v[0] + v[1] * v[1]; };
    const auto g = tape_gradient(f, {1.0, 2.0});
    CHECK(g[0] == Catch::Approx(2.0));
    CHECK(g[1] == Catch::Approx(4.0));
}

TEST_CASE("constants contribute no gradient") {
    auto f = [](const auto& v) { return v[0] * Var(3.0) + Var(7.0); };
    const auto g = tape_gradient(f, {2.0, 5.0});
    CHECK(g[0] == Catch::Approx(3.0));
    CHECK(g[1] == 0.0);
}

TEST_CASE("elementary functions match finite differences") {
    using dogfit::ad::cos;
    using dogfit::ad::exp;
    using dogfit::ad::log;
    using dogfit::ad::sin;
    using dogfit::ad::sqrt;
    using dogfit::ad::tanh;

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.2, 1.8);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x = {uni(rng), uni(rng), uni(rng)};
        auto fv = [](const std::vector<Var>& v) {
            return sin(v[0]) * cos(v[1]) + exp(v[2] / v[0]) + sqrt(v[1]) * tanh(v[2]) -
                   log(v[0] + v[1]);
        };
        auto fd = [&fv](const std::vector<double>& v) {
            Tape t;
            ScopedTape scope(&t);
            std::vector<Var> vars;
            for (double q : v) vars.emplace_back(q);
            return fv(vars).v;
        };
        const auto ga = tape_gradient(fv, x);
        const auto gn = fd_gradient(fd, x);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(ga[i] == Catch::Approx(gn[i]).epsilon(1e-6));
    }
}

TEST_CASE("tape reuse after clear") {
    Tape tape;
    ScopedTape scope(&tape);
    Var a = Var::leaf(2.0);
    Var b = a * a;
    auto adj = tape.backward(b.idx);
    CHECK(adj[static_cast<std::size_t>(a.idx)] == Catch::Approx(4.0));

    tape.clear();
    Var c = Var::leaf(3.0);
    Var d = c * c * c;
    adj = tape.backward(d.idx);
    CHECK(adj[static_cast<std::size_t>(c.idx)] == Catch::Approx(27.0));
}
