#include "saddle/search.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace saddle {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_zero_mean_v(const Field& v, const char* what) {
    if (std::abs(integrate(v)) > 1e-10 * std::max(norm_l2(v), 1e-300))
        throw std::invalid_argument(std::string(what) + ": direction v is not zero-mean");
}

/// Solve (D + a v<v,.>) psi = rhs on the zero-mean subspace, D diagonal in the
/// backend eigenbasis with inverse multipliers dinv (dinv[0] == 0).
Field solve_diag_rank1(const OperatorBackend& backend, const Array& dinv, const Field& rhs,
                       const Field& v, double a) {
    Field y0 = backend.apply_multiplier(rhs, dinv);
    if (a == 0.0) return y0;
    Field y1 = backend.apply_multiplier(v, dinv);
    const double denom = 1.0 + a * inner_l2(v, y1);
    if (std::abs(denom) < 1e-14)
        throw std::runtime_error("translation step: rank-one solve breakdown");
    y0.values -= (a * inner_l2(v, y0) / denom) * y1.values;
    return y0;
}

Array inverse_multipliers(const Array& d, bool keep_zero_mode) {
    Array dinv = d.inverse();
    if (!keep_zero_mode) dinv[0] = 0.0;
    return dinv;
}

}  // namespace

Method method_from_string(const std::string& s) {
    if (s == "imf-projected") return Method::ImfProjected;
    if (s == "imf-h1") return Method::ImfH1;
    if (s == "gad-projected") return Method::GadProjected;
    if (s == "gad-l2") return Method::GadL2;
    throw std::invalid_argument("unknown method: " + s);
}

std::string method_to_string(Method m) {
    switch (m) {
        case Method::ImfProjected: return "imf-projected";
        case Method::ImfH1: return "imf-h1";
        case Method::GadProjected: return "gad-projected";
        case Method::GadL2: return "gad-l2";
    }
    return "?";
}

std::string status_to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Converged: return "converged";
        case SearchStatus::MaxCycles: return "max-cycles";
        case SearchStatus::Diverged: return "diverged";
    }
    return "?";
}

void SearchConfig::validate() const {
    if (!(alpha + beta > 1.0))
        throw std::invalid_argument("search config: alpha + beta must be > 1");
    if (!(dt > 0.0)) throw std::invalid_argument("search config: dt must be > 0");
    if (!(outer_tol > 0.0)) throw std::invalid_argument("search config: outer_tol must be > 0");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("search config: inner_tol must be > 0");
    if (inner_iters < 0) throw std::invalid_argument("search config: inner_iters must be >= 0");
    if (max_cycles <= 0) throw std::invalid_argument("search config: max_cycles must be > 0");
    if (!(gad_gamma > 0.0)) throw std::invalid_argument("search config: gad_gamma must be > 0");
    if (fixed_budget && total_inner_budget < 0)
        throw std::invalid_argument("search config: negative inner-iteration budget");
}

double SearchConfig::effective_stabilization(const EnergyModel& model) const {
    if (stabilization >= 0.0) return stabilization;
    return dynamic_cast<const GinzburgLandau*>(&model) ? 2.0 : 1.0;
}

double residual_l2(const EnergyModel& model, const Field& phi) {
    return norm_l2(project(model.gradient_l2(phi)));
}

void ConvergenceTrace::write_csv(const std::string& path) const {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(fp, "cycle,inner_iters,residual_l2,energy,min_eig,wall_s\n");
    for (const TraceRecord& r : records)
        std::fprintf(fp, "%d,%ld,%.12e,%.12e,%.12e,%.12e\n", r.cycle, r.inner_iters,
                     r.residual_l2, r.energy, r.min_eig, r.wall_s);
    std::fclose(fp);
}

Field auxiliary_gradient(const EnergyModel& model, const Field& phi, const Field& phi_k,
                         const Field& v, double alpha, double beta) {
    require_same_grid(phi, phi_k);
    require_same_grid(phi, v);
    require_zero_mean_v(v, "auxiliary_gradient");
    const double c = inner_l2(v, Field(phi.grid, phi.values - phi_k.values));

    Field grad(phi.grid);
    grad.values = (1.0 - alpha) * model.gradient_l2(phi).values;
    if (alpha != 0.0) {
        Field shifted(phi.grid, phi.values - c * v.values);
        Field g = model.gradient_l2(shifted);
        grad.values += alpha * (g.values - inner_l2(v, g) * v.values);
    }
    if (beta != 0.0) {
        Field hat(phi.grid, phi_k.values + c * v.values);
        grad.values -= beta * inner_l2(v, model.gradient_l2(hat)) * v.values;
    }
    Field out = project(grad);
    out.values = -out.values;
    return out;
}

Field translation_step_convex_split(const GinzburgLandau& model, const Field& phi_n,
                                    const Field& phi_k, const Field& v, double dt) {
    require_same_grid(phi_n, phi_k);
    require_same_grid(phi_n, v);
    require_zero_mean_v(v, "translation_step_convex_split");
    const OperatorBackend& backend = model.backend();
    const double k2 = model.params().kappa * model.params().kappa;
    const double m = mean(phi_n);

    const double c = inner_l2(v, Field(phi_n.grid, phi_n.values - phi_k.values));
    Field phi_hat(phi_n.grid, phi_k.values + c * v.values);
    Field lap_hat = backend.laplacian(phi_hat);
    const double rank = 2.0 * inner_l2(v, Field(phi_n.grid, -k2 * lap_hat.values +
                                                                phi_hat.values.cube()));

    Field rhs(phi_n.grid);
    rhs.values = (phi_n.values - m) / dt - phi_n.values.cube() + 3.0 * phi_n.values +
                 rank * v.values;
    rhs = project(rhs);

    const Array d = 1.0 / dt + k2 * backend.neg_laplacian_symbol() + 2.0;
    Field psi = solve_diag_rank1(backend, inverse_multipliers(d, false), rhs, v, 2.0);
    psi.values += m;
    return psi;
}

Field translation_step_imex(const EnergyModel& model, const Field& phi_n,
                            const Field& phi_k, const Field& v, double dt, double a_stab) {
    require_same_grid(phi_n, phi_k);
    require_same_grid(phi_n, v);
    require_zero_mean_v(v, "translation_step_imex");
    if (a_stab < 0.0) throw std::invalid_argument("translation_step_imex: A must be >= 0");
    const OperatorBackend& backend = model.backend();
    const double c_lin = model.potential_linear_coeff();
    const double m = mean(phi_n);

    const double c = inner_l2(v, Field(phi_n.grid, phi_n.values - phi_k.values));
    Field phi_hat(phi_n.grid, phi_k.values + c * v.values);
    const double rank = 2.0 * inner_l2(v, model.gradient_l2(phi_hat));

    Field rhs(phi_n.grid);
    rhs.values = (phi_n.values - m) / dt - model.potential_deriv(phi_n.values) +
                 a_stab * phi_n.values +
                 (rank - 2.0 * c_lin * inner_l2(v, phi_n)) * v.values;
    rhs = project(rhs);

    const Array d = 1.0 / dt + model.linear_symbol() + a_stab;
    Field psi =
        solve_diag_rank1(backend, inverse_multipliers(d, false), rhs, v, -2.0 * c_lin);
    psi.values += m;
    return psi;
}

Field translation_step_h1(const EnergyModel& model, const Field& phi_n, const Field& phi_k,
                          const Field& v, double dt, double a_stab) {
    require_same_grid(phi_n, phi_k);
    require_same_grid(phi_n, v);
    require_zero_mean_v(v, "translation_step_h1");
    const OperatorBackend& backend = model.backend();
    const double m = mean(phi_n);

    // H^-1 pairing for phihat goes through the Poisson inverse
    Field u = backend.inverse_neg_laplacian(project(v));
    const double c = inner_l2(u, Field(phi_n.grid, phi_n.values - phi_k.values));
    Field phi_hat(phi_n.grid, phi_k.values + c * v.values);
    const double rank = 2.0 * inner_l2(model.gradient_l2(phi_hat), v);

    Field nonlinear(phi_n.grid,
                    model.potential_deriv(phi_n.values) - a_stab * phi_n.values);
    Field lap_nl = backend.laplacian(nonlinear);

    Field rhs(phi_n.grid);
    rhs.values = (phi_n.values - m) / dt + lap_nl.values + rank * v.values;
    rhs = project(rhs);

    const Array& mlap = backend.neg_laplacian_symbol();
    Array d = 1.0 / dt + mlap * (model.linear_symbol() + a_stab);
    Field psi = backend.apply_multiplier(rhs, inverse_multipliers(d, false));
    psi.values += m;
    return psi;
}

void gad_rhs(const EnergyModel& model, const Field& phi, const Field& v, double gad_gamma,
             bool projected, Field& dphi, Field& dv) {
    const double vv = inner_l2(v, v);
    if (vv < 1e-28) throw std::runtime_error("gad: degenerate direction (||v|| ~ 0)");
    Field grad = model.gradient_l2(phi);
    Field hv = model.hessian_apply(phi, projected ? project(v) : v);
    const double rank = 2.0 * inner_l2(grad, v) / vv;
    dphi = Field(phi.grid);
    dv = Field(phi.grid);
    if (projected) {
        Field pv = project(v);
        dphi.values = -project(grad).values + rank * pv.values;
        dv.values = (-project(hv).values + inner_l2(v, hv) * v.values) / gad_gamma;
    } else {
        dphi.values = -grad.values + rank * v.values;
        dv.values = (-hv.values + inner_l2(v, hv) / vv * v.values) / gad_gamma;
    }
}

Field gad_relax_direction(const EnergyModel& model, const Field& phi, const Field& v,
                          double dt, double gad_gamma, double a_stab, bool projected) {
    const double nv = norm_l2(v);
    if (nv < 1e-14) throw std::runtime_error("gad: degenerate direction (||v|| ~ 0)");
    const OperatorBackend& backend = model.backend();
    const Array curv = model.potential_curvature(phi.values);
    Field hv = model.hessian_apply(phi, v);
    const double vhv = inner_l2(v, hv) / (nv * nv);

    Field rhs(phi.grid);
    rhs.values = (gad_gamma / dt) * v.values - curv * v.values + a_stab * v.values +
                 vhv * v.values;
    if (projected) rhs = project(rhs);
    const Array d = gad_gamma / dt + model.linear_symbol() + a_stab;
    Field vn = backend.apply_multiplier(rhs, inverse_multipliers(d, !projected));
    if (projected) vn = project(vn);
    const double n = norm_l2(vn);
    if (n < 1e-14) throw std::runtime_error("gad: degenerate direction after relaxation");
    vn.values /= n;
    return vn;
}

std::pair<Field, Field> gad_step(const EnergyModel& model, const Field& phi, const Field& v,
                                 const SearchConfig& cfg) {
    const bool projected = cfg.method != Method::GadL2;
    if (projected) require_zero_mean_v(v, "gad_step");
    const double nv = norm_l2(v);
    if (nv < 1e-14) throw std::runtime_error("gad: degenerate direction (||v|| ~ 0)");
    const OperatorBackend& backend = model.backend();
    const double a_stab = cfg.effective_stabilization(model);
    const double dt = cfg.dt;
    const double m = mean(phi);

    Field grad = model.gradient_l2(phi);
    const double rank = 2.0 * inner_l2(grad, v) / (nv * nv);

    Field rhs(phi.grid);
    rhs.values = -model.potential_deriv(phi.values) + a_stab * phi.values + rank * v.values;
    const Array d = 1.0 / dt + model.linear_symbol() + a_stab;
    Field phi_next(phi.grid);
    if (projected) {
        rhs.values += (phi.values - m) / dt;
        rhs = project(rhs);
        phi_next = backend.apply_multiplier(rhs, inverse_multipliers(d, false));
        phi_next.values += m;
    } else {
        rhs.values += phi.values / dt;
        phi_next = backend.apply_multiplier(rhs, inverse_multipliers(d, true));
    }

    Field v_next = gad_relax_direction(model, phi, v, dt, cfg.gad_gamma, a_stab, projected);
    return {std::move(phi_next), std::move(v_next)};
}

namespace {

struct Stepper {
    const EnergyModel& model;
    const SearchConfig& cfg;
    double a_stab;

    Field step(const Field& phi, const Field& phi_k, const Field& v) const {
        if (cfg.method == Method::ImfH1)
            return translation_step_h1(model, phi, phi_k, v, cfg.dt, a_stab);
        return translation_step_imex(model, phi, phi_k, v, cfg.dt, a_stab);
    }
};

bool diverged(const Field& phi, double res) {
    return !phi.finite() || !std::isfinite(res) || res > 1e6;
}

}  // namespace

SaddleResult imf_search(const EnergyModel& model, const Field& phi0, const SearchConfig& cfg) {
    cfg.validate();
    if (cfg.method != Method::ImfProjected && cfg.method != Method::ImfH1)
        throw std::invalid_argument("imf_search: config selects a GAD method");
    if (std::abs(mean(phi0) - model.mass()) > 1e-10 * std::max(1.0, std::abs(model.mass())))
        throw std::invalid_argument("imf_search: mean(phi0) does not match the model mass");

    const Metric metric = cfg.method == Method::ImfH1 ? Metric::H1 : Metric::ProjectedL2;
    const Stepper stepper{model, cfg, cfg.effective_stabilization(model)};

    SaddleResult result;
    Field phi = phi0;
    Field v;
    bool have_v = false;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    long remaining = cfg.fixed_budget ? cfg.total_inner_budget : -1;
    const auto t0 = Clock::now();
    auto wall = [&] { return cfg.record_walltime ? seconds_since(t0) : 0.0; };

    result.status = SearchStatus::MaxCycles;
    for (int cycle = 0; cycle < cfg.max_cycles; ++cycle) {
        const double res = phi.finite() ? residual_l2(model, phi) : std::nan("");
        if (diverged(phi, res)) {
            result.trace.records.push_back({cycle, 0, res, std::nan(""), lambda, wall()});
            result.status = SearchStatus::Diverged;
            break;
        }
        const double en = model.energy(phi);
        const bool budget_done = cfg.fixed_budget && remaining == 0;
        const bool hit_tol = !cfg.fixed_budget && res <= cfg.outer_tol;
        if (hit_tol || budget_done) {
            if (!have_v) {
                MinModeOptions o{cfg.minmode_tol, cfg.minmode_max_iters, metric, cfg.seed, {}};
                MinModeResult r = min_mode(model, phi, o);
                lambda = r.eigenvalue;
                v = r.eigenvector;
                have_v = true;
            }
            result.trace.records.push_back({cycle, 0, res, en, lambda, wall()});
            if (cfg.cycle_observer) cfg.cycle_observer(phi);
            result.status =
                res <= cfg.outer_tol ? SearchStatus::Converged : SearchStatus::MaxCycles;
            break;
        }

        // rotation step, warm-started from the previous cycle's direction
        MinModeOptions o{cfg.minmode_tol, cfg.minmode_max_iters, metric, cfg.seed, {}};
        if (have_v) o.guess = v;
        MinModeResult rot = min_mode(model, phi, o);
        lambda = rot.eigenvalue;
        v = rot.eigenvector;
        have_v = true;

        // translation step(s) against the frozen (phi_k, v)
        const Field phi_k = phi;
        long used = 0;
        if (cfg.inner_iters > 0 || cfg.fixed_budget) {
            long steps = cfg.inner_iters > 0 ? cfg.inner_iters : 100;
            if (cfg.fixed_budget) steps = std::min(steps, remaining);
            for (long i = 0; i < steps; ++i) phi = stepper.step(phi, phi_k, v);
            used = steps;
        } else {
            const long cap = 1000000;
            while (used < cap) {
                Field next = stepper.step(phi, phi_k, v);
                const double delta = norm_l2(Field(phi.grid, next.values - phi.values));
                phi = std::move(next);
                ++used;
                if (delta / cfg.dt <= cfg.inner_tol) break;
            }
        }
        if (cfg.fixed_budget) remaining -= used;
        result.total_inner_iters += used;
        result.trace.records.push_back({cycle, used, res, en, lambda, wall()});
        if (cfg.cycle_observer) cfg.cycle_observer(phi);
    }

    result.phi_star = phi;
    result.v_star = have_v ? v : Field(phi.grid);
    result.lambda = lambda;
    result.wall_s = seconds_since(t0);
    return result;
}

SaddleResult gad_search(const EnergyModel& model, const Field& phi0,
                        const std::optional<Field>& v0, const SearchConfig& cfg) {
    cfg.validate();
    if (cfg.method != Method::GadProjected && cfg.method != Method::GadL2)
        throw std::invalid_argument("gad_search: config selects an IMF method");
    const bool projected = cfg.method == Method::GadProjected;
    if (projected &&
        std::abs(mean(phi0) - model.mass()) > 1e-10 * std::max(1.0, std::abs(model.mass())))
        throw std::invalid_argument("gad_search: mean(phi0) does not match the model mass");

    Field phi = phi0;
    Field v = v0 ? *v0 : random_zero_mean_unit(model.grid(), cfg.seed);
    if (projected) v = project(v);
    v.values /= norm_l2(v);

    SaddleResult result;
    result.status = SearchStatus::MaxCycles;
    long remaining = cfg.fixed_budget ? cfg.total_inner_budget : -1;
    const auto t0 = Clock::now();
    auto wall = [&] { return cfg.record_walltime ? seconds_since(t0) : 0.0; };

    for (int cycle = 0; cycle < cfg.max_cycles; ++cycle) {
        Field grad = phi.finite() ? model.gradient_l2(phi) : Field(phi.grid);
        const double res = phi.finite() ? norm_l2(project(grad)) : std::nan("");
        const double full_res = phi.finite() ? norm_l2(grad) : std::nan("");
        if (diverged(phi, res)) {
            result.trace.records.push_back({cycle, 0, res, std::nan(""),
                                            std::nan(""), wall()});
            result.status = SearchStatus::Diverged;
            break;
        }
        const double rq = inner_l2(v, model.hessian_apply(phi, v)) / inner_l2(v, v);
        const double en = model.energy(phi);
        const double stop_res = projected ? res : full_res;
        const bool budget_done = cfg.fixed_budget && remaining == 0;
        if ((!cfg.fixed_budget && stop_res <= cfg.outer_tol) || budget_done) {
            result.trace.records.push_back({cycle, 0, res, en, rq, wall()});
            if (cfg.cycle_observer) cfg.cycle_observer(phi);
            result.status = stop_res <= cfg.outer_tol ? SearchStatus::Converged
                                                      : SearchStatus::MaxCycles;
            break;
        }
        auto [phi_next, v_next] = gad_step(model, phi, v, cfg);
        phi = std::move(phi_next);
        v = std::move(v_next);
        if (cfg.fixed_budget) --remaining;
        ++result.total_inner_iters;
        result.trace.records.push_back({cycle, 1, res, en, rq, wall()});
        if (cfg.cycle_observer) cfg.cycle_observer(phi);
    }

    result.phi_star = phi;
    result.v_star = v;
    result.lambda = inner_l2(v, model.hessian_apply(phi, v)) / inner_l2(v, v);
    result.wall_s = seconds_since(t0);
    return result;
}

SaddleResult run_search(const EnergyModel& model, const Field& phi0,
                        const std::optional<Field>& v0, const SearchConfig& cfg) {
    if (cfg.method == Method::ImfProjected || cfg.method == Method::ImfH1)
        return imf_search(model, phi0, cfg);
    return gad_search(model, phi0, v0, cfg);
}

Index1Report verify_index1(const EnergyModel& model, const Field& phi, double tol,
                           unsigned long seed) {
    Index1Report rep;
    rep.residual = residual_l2(model, phi);
    MinModeOptions o;
    o.tolerance = tol;
    o.metric = Metric::ProjectedL2;
    o.seed = seed;
    MinModeResult first = min_mode(model, phi, o);
    MinModeResult second = min_mode_deflated(model, phi, o, first);
    rep.lambda1 = std::min(first.eigenvalue, second.eigenvalue);
    rep.lambda2 = std::max(first.eigenvalue, second.eigenvalue);
    rep.degenerate = std::abs(rep.lambda2 - rep.lambda1) <= 1e-8;
    rep.is_index1 = rep.lambda1 < 0.0 && rep.lambda2 > 0.0;
    return rep;
}

}  // namespace saddle
