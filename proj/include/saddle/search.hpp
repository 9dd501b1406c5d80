#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "saddle/energy.hpp"
#include "saddle/minmode.hpp"

namespace saddle {

enum class Method { ImfProjected, ImfH1, GadProjected, GadL2 };

Method method_from_string(const std::string& s);
std::string method_to_string(Method m);

struct SearchConfig {
    Method method = Method::ImfProjected;
    double alpha = 0.0;
    double beta = 2.0;          // auxiliary functional parameters, alpha + beta > 1
    double dt = 0.1;
    int inner_iters = 100;      // translation iterations per cycle; 0 = solve to inner_tol
    double inner_tol = 1e-10;
    double outer_tol = 1e-8;    // stop when ||P dF(phi)||_{L2} <= outer_tol
    int max_cycles = 10000;
    double gad_gamma = 1.0;
    double stabilization = -1.0;  // implicit A*I shift; < 0 picks the model default
    unsigned long seed = 1;
    double minmode_tol = 1e-10;
    int minmode_max_iters = 10000;
    bool record_walltime = true;
    // benchmark mode: execute exactly total_inner_budget translation steps,
    // ignoring outer_tol
    bool fixed_budget = false;
    long total_inner_budget = 0;
    // observation hook, called with the current state at every recorded cycle
    std::function<void(const Field&)> cycle_observer;

    void validate() const;  // throws std::invalid_argument
    double effective_stabilization(const EnergyModel& model) const;
};

struct TraceRecord {
    int cycle = 0;
    long inner_iters = 0;
    double residual_l2 = 0.0;
    double energy = 0.0;
    double min_eig = 0.0;
    double wall_s = 0.0;
};

struct ConvergenceTrace {
    std::vector<TraceRecord> records;
    void write_csv(const std::string& path) const;
};

enum class SearchStatus { Converged, MaxCycles, Diverged };
std::string status_to_string(SearchStatus s);

struct SaddleResult {
    Field phi_star;
    Field v_star;
    double lambda = 0.0;
    ConvergenceTrace trace;
    SearchStatus status = SearchStatus::MaxCycles;
    long total_inner_iters = 0;
    double wall_s = 0.0;
};

/// ||P dF(phi)||_{L2}, the outer convergence residual.
double residual_l2(const EnergyModel& model, const Field& phi);

/// -P dL/dphi for the auxiliary functional
///   L = (1-alpha) F(phi) + alpha F(phi - c v) - beta F(phi_k + c v),
/// c = <v, phi - phi_k>_{L2}. v must be zero-mean (unit for the IMF use).
Field auxiliary_gradient(const EnergyModel& model, const Field& phi, const Field& phi_k,
                         const Field& v, double alpha = 0.0, double beta = 2.0);

/// One step of the 1D Ginzburg-Landau convex-splitting translation scheme:
///   (phi' - phi)/dt = P[k^2 Lap phi' - 2 phi' - 2<v,phi'>v]
///                   + P[-phi^3 + 3 phi + 2<v, -k^2 Lap phihat + phihat^3> v].
/// The implicit system is diagonal in the backend eigenbasis plus a rank-one
/// term, solved by a Sherman-Morrison update on the zero-mean subspace.
Field translation_step_convex_split(const GinzburgLandau& model, const Field& phi_n,
                                    const Field& phi_k, const Field& v, double dt);

/// Generalized IMEX translation step for the projected flow: the linear
/// operator L0 plus A*I and the rank-one part fed by the potential's linear
/// term are implicit, the remaining nonlinear terms explicit. The GL instance
/// with A = 2 reproduces translation_step_convex_split.
Field translation_step_imex(const EnergyModel& model, const Field& phi_n,
                            const Field& phi_k, const Field& v, double dt, double a_stab);

/// IMEX step of the direct H^-1 translation flow
///   dphi/dt = Lap dF(phi) + 2 <dF(phihat), v>_{L2} v,
/// phihat = phi_k + <v, phi-phi_k>_{H^-1} v (v normalized in H^-1).
Field translation_step_h1(const EnergyModel& model, const Field& phi_n, const Field& phi_k,
                          const Field& v, double dt, double a_stab);

/// Continuous right-hand sides of the (projected or plain L2) GAD flow;
/// dv is v-dot (relaxation gamma already divided out).
void gad_rhs(const EnergyModel& model, const Field& phi, const Field& v, double gad_gamma,
             bool projected, Field& dphi, Field& dv);

/// One semi-implicit step of the direction relaxation
///   gamma dv/dt = -P H P v + <v, H v> v,
/// followed by projection and L2 renormalization.
Field gad_relax_direction(const EnergyModel& model, const Field& phi, const Field& v,
                          double dt, double gad_gamma, double a_stab, bool projected);

/// One semi-implicit time step of the coupled GAD flow.
std::pair<Field, Field> gad_step(const EnergyModel& model, const Field& phi, const Field& v,
                                 const SearchConfig& cfg);

/// IMF outer loop: alternates min_mode rotation and translation stepping.
SaddleResult imf_search(const EnergyModel& model, const Field& phi0, const SearchConfig& cfg);

/// GAD loop; v0 defaults to a seeded random zero-mean unit vector.
SaddleResult gad_search(const EnergyModel& model, const Field& phi0,
                        const std::optional<Field>& v0, const SearchConfig& cfg);

/// Dispatch on cfg.method.
SaddleResult run_search(const EnergyModel& model, const Field& phi0,
                        const std::optional<Field>& v0, const SearchConfig& cfg);

struct Index1Report {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    bool is_index1 = false;
    bool degenerate = false;  // |lambda2 - lambda1| <= 1e-8
    double residual = 0.0;    // ||P dF(phi)||, reported but not enforced
};

/// Two smallest eigenvalues of P H P by min_mode plus deflation.
Index1Report verify_index1(const EnergyModel& model, const Field& phi,
                           double tol = 1e-10, unsigned long seed = 1);

}  // namespace saddle
