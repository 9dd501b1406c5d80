#pragma once

#include <memory>
#include <string>

#include "saddle/grid.hpp"
#include "saddle/operators.hpp"

namespace saddle {

/// Energy functional with value, L2 first variation and Hessian action.
///
/// The leading linear operator (the "interface" term) is applied through the
/// backend, so gradients and Hessians are exactly consistent with the energy
/// for either backend kind.
class EnergyModel {
public:
    virtual ~EnergyModel() = default;

    virtual const std::string& name() const = 0;
    const Grid& grid() const { return backend_->grid(); }
    const OperatorBackend& backend() const { return *backend_; }

    /// Conserved mean value of phi for this run's experiment.
    double mass() const { return mass_; }

    double energy(const Field& phi) const;

    /// delta F / delta phi in L2, no projection applied.
    Field gradient_l2(const Field& phi) const;

    /// H(phi) v = linear part applied to v plus potential curvature times v.
    Field hessian_apply(const Field& phi, const Field& v) const;

    /// Leading linear operator L0 (GL: -kappa^2*Lap, LB: xi^2*(Lap+1)^2).
    virtual Field apply_linear(const Field& f) const = 0;

    /// Per-mode symbol of L0, used for implicit solves and preconditioning.
    virtual Array linear_symbol() const = 0;

    /// Potential derivative and curvature, pointwise.
    virtual Array potential_deriv(const Array& phi) const = 0;
    virtual Array potential_curvature(const Array& phi) const = 0;
    virtual Array potential(const Array& phi) const = 0;

    /// Coefficient of the linear term inside potential_deriv (GL: -1, LB: tau);
    /// the implicit part of the rank-one term in the IMEX translation scheme.
    virtual double potential_linear_coeff() const = 0;

protected:
    EnergyModel(std::shared_ptr<OperatorBackend> backend, double mass)
        : backend_(std::move(backend)), mass_(mass) {}

    std::shared_ptr<OperatorBackend> backend_;
    double mass_;
};

struct GinzburgLandauParams {
    double kappa = 0.04;
    double mass = 0.6;  // conserved mean value of phi (|Omega| = 1 in the 1D setup)
};

/// F(phi) = int kappa^2/2 |grad phi|^2 + (phi^2-1)^2/4.
class GinzburgLandau : public EnergyModel {
public:
    GinzburgLandau(std::shared_ptr<OperatorBackend> backend, GinzburgLandauParams p);

    const std::string& name() const override { return name_; }
    const GinzburgLandauParams& params() const { return params_; }

    Field apply_linear(const Field& f) const override;
    Array linear_symbol() const override;
    Array potential_deriv(const Array& phi) const override;
    Array potential_curvature(const Array& phi) const override;
    Array potential(const Array& phi) const override;
    double potential_linear_coeff() const override { return -1.0; }

private:
    GinzburgLandauParams params_;
    std::string name_ = "ginzburg-landau";
};

struct LandauBrazovskiiParams {
    double tau = -0.15;
    double xi = 1.0;
    double gamma = 0.25;  // cubic coefficient
    double mass = 0.0;    // mean value of phi; paper does not state it, default 0
};

/// F(phi) = int xi^2/2 [(Lap+1) phi]^2 + tau/2 phi^2 - gamma/6 phi^3 + phi^4/24.
class LandauBrazovskii : public EnergyModel {
public:
    LandauBrazovskii(std::shared_ptr<OperatorBackend> backend, LandauBrazovskiiParams p);

    const std::string& name() const override { return name_; }
    const LandauBrazovskiiParams& params() const { return params_; }

    Field apply_linear(const Field& f) const override;
    Array linear_symbol() const override;
    Array potential_deriv(const Array& phi) const override;
    Array potential_curvature(const Array& phi) const override;
    Array potential(const Array& phi) const override;
    double potential_linear_coeff() const override { return params_.tau; }

private:
    LandauBrazovskiiParams params_;
    std::string name_ = "landau-brazovskii";
};

}  // namespace saddle
