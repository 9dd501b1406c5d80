#include "saddle/energy.hpp"

#include <stdexcept>

namespace saddle {

double EnergyModel::energy(const Field& phi) const {
    if (phi.grid != grid()) throw std::invalid_argument("energy: field on wrong grid");
    // Gradient-energy term via integration by parts on the torus:
    // 1/2 <L0 phi, phi>_{L2}, exact for periodic fields.
    const double quad = 0.5 * inner_l2(apply_linear(phi), phi);
    const double pot = potential(phi.values).sum() * phi.grid.cell_volume();
    return quad + pot;
}

Field EnergyModel::gradient_l2(const Field& phi) const {
    if (phi.grid != grid()) throw std::invalid_argument("gradient_l2: field on wrong grid");
    Field g = apply_linear(phi);
    g.values += potential_deriv(phi.values);
    return g;
}

Field EnergyModel::hessian_apply(const Field& phi, const Field& v) const {
    if (phi.grid != grid() || v.grid != grid())
        throw std::invalid_argument("hessian_apply: field on wrong grid");
    Field hv = apply_linear(v);
    hv.values += potential_curvature(phi.values) * v.values;
    return hv;
}

GinzburgLandau::GinzburgLandau(std::shared_ptr<OperatorBackend> backend,
                               GinzburgLandauParams p)
    : EnergyModel(std::move(backend), p.mass), params_(p) {
    if (!(params_.kappa > 0.0)) throw std::invalid_argument("ginzburg-landau: kappa must be > 0");
}

Field GinzburgLandau::apply_linear(const Field& f) const {
    const double k2 = params_.kappa * params_.kappa;
    Field out = backend_->apply_multiplier(f, backend_->neg_laplacian_symbol());
    out.values *= k2;
    return out;
}

Array GinzburgLandau::linear_symbol() const {
    return params_.kappa * params_.kappa * backend_->neg_laplacian_symbol();
}

Array GinzburgLandau::potential_deriv(const Array& phi) const {
    return phi.cube() - phi;
}

Array GinzburgLandau::potential_curvature(const Array& phi) const {
    return 3.0 * phi.square() - 1.0;
}

Array GinzburgLandau::potential(const Array& phi) const {
    return 0.25 * (phi.square() - 1.0).square();
}

LandauBrazovskii::LandauBrazovskii(std::shared_ptr<OperatorBackend> backend,
                                   LandauBrazovskiiParams p)
    : EnergyModel(std::move(backend), p.mass), params_(p) {
    if (!(params_.xi > 0.0)) throw std::invalid_argument("landau-brazovskii: xi must be > 0");
}

Field LandauBrazovskii::apply_linear(const Field& f) const {
    const double x2 = params_.xi * params_.xi;
    Field out = backend_->biharmonic_shifted(f);
    out.values *= x2;
    return out;
}

Array LandauBrazovskii::linear_symbol() const {
    return params_.xi * params_.xi * backend_->biharmonic_shifted_symbol();
}

Array LandauBrazovskii::potential_deriv(const Array& phi) const {
    const double tau = params_.tau, g = params_.gamma;
    return tau * phi - 0.5 * g * phi.square() + phi.cube() / 6.0;
}

Array LandauBrazovskii::potential_curvature(const Array& phi) const {
    const double tau = params_.tau, g = params_.gamma;
    return tau - g * phi + 0.5 * phi.square();
}

Array LandauBrazovskii::potential(const Array& phi) const {
    const double tau = params_.tau, g = params_.gamma;
    return 0.5 * tau * phi.square() - g / 6.0 * phi.cube() + phi.square().square() / 24.0;
}

}  // namespace saddle
