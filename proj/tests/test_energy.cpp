#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "saddle/energy.hpp"

using namespace saddle;

namespace {

std::unique_ptr<GinzburgLandau> make_gl(BackendKind kind = BackendKind::FiniteDifference,
                                        int n = 100) {
    Grid g = Grid::make_1d(n, 1.0);
    auto backend = std::make_shared<OperatorBackend>(g, kind);
    return std::make_unique<GinzburgLandau>(backend, GinzburgLandauParams{});
}

std::unique_ptr<LandauBrazovskii> make_lb(int n = 64) {
    Grid g = Grid::make_2d(n, n, 16.0 * M_PI / std::sqrt(3.0), 8.0 * M_PI);
    auto backend = std::make_shared<OperatorBackend>(g, BackendKind::Spectral);
    return std::make_unique<LandauBrazovskii>(backend, LandauBrazovskiiParams{});
}

Field smooth_random(const Grid& g, unsigned seed, double amp = 0.3) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double v = 0.0;
            // a few low-frequency modes with random coefficients
            for (int k = 1; k <= 3; ++k)
                v += dist(gen) * std::cos(2.0 * M_PI * k * g.x(ix) / g.lx) +
                     dist(gen) * std::sin(2.0 * M_PI * k * g.y(iy) / g.ly);
            f(ix, iy) = amp * v;
        }
    return f;
}

Field cyclic_shift(const Field& f, int sx, int sy) {
    const Grid& g = f.grid;
    Field out(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            out(ix, iy) = f((ix + sx) % g.nx, (iy + sy) % g.ny);
    return out;
}

}  // namespace

TEST_CASE("energy values at constant states") {
    auto gl = make_gl();
    CHECK(gl->energy(constant_field(gl->grid(), 1.0)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(gl->energy(constant_field(gl->grid(), 0.0)) == doctest::Approx(0.25).epsilon(1e-14));

    auto lb = make_lb();
    CHECK(std::abs(lb->energy(Field(lb->grid()))) <= 1e-14);
}

TEST_CASE("gradient at constant states") {
    auto gl = make_gl();
    CHECK(gl->gradient_l2(Field(gl->grid())).values.abs().maxCoeff() <= 1e-12);

    Field c6 = constant_field(gl->grid(), 0.6);
    CHECK((gl->gradient_l2(c6).values + 0.384).abs().maxCoeff() <= 1e-12);  // 0.6^3 - 0.6

    auto lb = make_lb();
    const double c = 0.1;
    const auto& p = lb->params();
    // xi^2 c + tau c - gamma/2 c^2 + c^3/6 = 0.1 - 0.015 - 0.00125 + 1.6667e-4
    const double expected = p.xi * p.xi * c + p.tau * c - 0.5 * p.gamma * c * c + c * c * c / 6.0;
    CHECK(expected == doctest::Approx(0.083917).epsilon(1e-5));
    Field grad = lb->gradient_l2(constant_field(lb->grid(), c));
    CHECK((grad.values - expected).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("hessian action on eigenmodes") {
    auto gl = make_gl(BackendKind::Spectral);
    const Grid& g = gl->grid();
    Field s(g);
    for (int i = 0; i < g.nx; ++i) s.values[i] = std::sin(2.0 * M_PI * g.x(i));

    const double kappa = gl->params().kappa;
    const double lam = kappa * kappa * 4.0 * M_PI * M_PI - 1.0;  // ~ -0.936834
    Field hs = gl->hessian_apply(Field(g), s);
    CHECK((hs.values - lam * s.values).abs().maxCoeff() <= 1e-12);

    CHECK(gl->hessian_apply(s, Field(g)).values.abs().maxCoeff() == 0.0);

    auto lb = make_lb();
    const Grid& g2 = lb->grid();
    Field shell(g2);
    for (int iy = 0; iy < g2.ny; ++iy)
        for (int ix = 0; ix < g2.nx; ++ix) shell(ix, iy) = std::cos(g2.y(iy));  // |q|^2 = 1
    Field hshell = lb->hessian_apply(Field(g2), shell);
    CHECK((hshell.values - lb->params().tau * shell.values).abs().maxCoeff() <= 1e-11);
}

TEST_CASE("gradient consistency with finite differences of the energy") {
    auto gl = make_gl();
    auto lb = make_lb();
    const double eps = 1e-5;
    for (const EnergyModel* model : {static_cast<const EnergyModel*>(gl.get()),
                                     static_cast<const EnergyModel*>(lb.get())}) {
        const Grid& g = model->grid();
        for (unsigned seed = 0; seed < 5; ++seed) {
            Field phi = smooth_random(g, seed);
            Field v = smooth_random(g, seed + 50);
            Field plus(g), minus(g);
            plus.values = phi.values + eps * v.values;
            minus.values = phi.values - eps * v.values;
            const double fd = (model->energy(plus) - model->energy(minus)) / (2.0 * eps);
            const double an = inner_l2(model->gradient_l2(phi), v);
            CHECK(std::abs(fd - an) <= 1e-5 * (std::abs(an) + 1e-3));
        }
    }
}

TEST_CASE("hessian consistency with finite differences of the gradient") {
    auto gl = make_gl();
    auto lb = make_lb();
    const double eps = 1e-5;
    for (const EnergyModel* model : {static_cast<const EnergyModel*>(gl.get()),
                                     static_cast<const EnergyModel*>(lb.get())}) {
        const Grid& g = model->grid();
        for (unsigned seed = 0; seed < 3; ++seed) {
            Field phi = smooth_random(g, seed + 10);
            Field v = smooth_random(g, seed + 60);
            Field plus(g), minus(g);
            plus.values = phi.values + eps * v.values;
            minus.values = phi.values - eps * v.values;
            Array fd = (model->gradient_l2(plus).values - model->gradient_l2(minus).values) /
                       (2.0 * eps);
            Array an = model->hessian_apply(phi, v).values;
            const double scale = an.abs().maxCoeff() + 1e-3;
            CHECK((fd - an).abs().maxCoeff() <= 1e-4 * scale);
        }
    }
}

TEST_CASE("hessian symmetry") {
    auto gl = make_gl();
    auto lb = make_lb();
    for (const EnergyModel* model : {static_cast<const EnergyModel*>(gl.get()),
                                     static_cast<const EnergyModel*>(lb.get())}) {
        const Grid& g = model->grid();
        Field phi = smooth_random(g, 1);
        for (unsigned seed = 0; seed < 3; ++seed) {
            Field v = smooth_random(g, seed + 70);
            Field w = smooth_random(g, seed + 170);
            const double vw = inner_l2(model->hessian_apply(phi, v), w);
            const double wv = inner_l2(v, model->hessian_apply(phi, w));
            CHECK(std::abs(vw - wv) <= 1e-11 * (std::abs(vw) + 1.0));
        }
    }
}

TEST_CASE("energy is invariant under cyclic shifts") {
    auto gl = make_gl();
    Field phi = smooth_random(gl->grid(), 4);
    const double e0 = gl->energy(phi);
    CHECK(gl->energy(cyclic_shift(phi, 13, 0)) ==
          doctest::Approx(e0).epsilon(1e-12));

    auto lb = make_lb();
    Field phi2 = smooth_random(lb->grid(), 5);
    const double e2 = lb->energy(phi2);
    CHECK(lb->energy(cyclic_shift(phi2, 7, 11)) == doctest::Approx(e2).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    Grid g = Grid::make_1d(100, 1.0);
    auto backend = std::make_shared<OperatorBackend>(g, BackendKind::FiniteDifference);
    CHECK_THROWS_AS(GinzburgLandau(backend, GinzburgLandauParams{-0.1, 0.6}),
                    std::invalid_argument);

    Grid g2 = Grid::make_2d(64, 64, 16.0 * M_PI / std::sqrt(3.0), 8.0 * M_PI);
    auto sp = std::make_shared<OperatorBackend>(g2, BackendKind::Spectral);
    LandauBrazovskiiParams bad;
    bad.xi = 0.0;
    CHECK_THROWS_AS(LandauBrazovskii(sp, bad), std::invalid_argument);
}

TEST_CASE("grid mismatch raises") {
    auto gl = make_gl();
    Field wrong = constant_field(Grid::make_1d(64, 1.0), 0.5);
    CHECK_THROWS_AS(gl->energy(wrong), std::invalid_argument);
    CHECK_THROWS_AS(gl->gradient_l2(wrong), std::invalid_argument);
    CHECK_THROWS_AS(gl->hessian_apply(wrong, wrong), std::invalid_argument);
}
