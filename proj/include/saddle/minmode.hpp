#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "saddle/energy.hpp"

namespace saddle {

enum class Metric { ProjectedL2, H1 };

struct MinModeOptions {
    double tolerance = 1e-10;   // residual ||A v - lambda v|| at unit norm
    int max_iterations = 10000;
    Metric metric = Metric::ProjectedL2;
    unsigned long seed = 1;     // seeds the random zero-mean start vector
    std::optional<Field> guess; // warm start, overrides the random start
};

struct MinModeResult {
    double eigenvalue = 0.0;
    Field eigenvector;   // zero-mean; unit norm in the solver's metric
    double residual = 0.0;
    int iterations = 0;
};

class MinModeError : public std::runtime_error {
public:
    MinModeError(const std::string& msg, MinModeResult best)
        : std::runtime_error(msg), best_iterate(std::move(best)) {}
    MinModeResult best_iterate;
};

/// Rayleigh quotient of the constrained Hessian at phi in the given metric:
///   projected-L2: <psi, P H P psi> / <psi, psi>
///   H-1:          <psi, H psi>     / <psi, psi>_{H^-1}
/// psi must be zero-mean and nonzero.
double rayleigh_quotient(const EnergyModel& model, const Field& phi, const Field& psi,
                         Metric metric);

/// Smallest constrained eigenpair by locally-optimal CG minimization of the
/// Rayleigh quotient on the zero-mean subspace, with a diagonal spectral
/// preconditioner built from the backend symbols. The H-1 problem is solved as
/// a standard symmetric problem in w = (-Lap)^{-1/2} psi.
MinModeResult min_mode(const EnergyModel& model, const Field& phi,
                       const MinModeOptions& opts);

/// Same iteration deflated against the eigenvector of `first` (second-smallest
/// eigenpair; used for index-1 verification).
MinModeResult min_mode_deflated(const EnergyModel& model, const Field& phi,
                                const MinModeOptions& opts, const MinModeResult& first);

/// Full constrained spectrum on small grids (<= 64 points total) by dense
/// assembly of the constrained operator via hessian_apply on basis vectors.
/// Eigenvectors are returned in the solver's working space: psi for
/// projected-L2, w = (-Lap)^{-1/2} psi for H-1.
struct DenseSpectrum {
    Eigen::VectorXd eigenvalues;        // ascending
    std::vector<Field> eigenvectors;    // zero-mean, orthonormal in L2
};
DenseSpectrum dense_oracle(const EnergyModel& model, const Field& phi, Metric metric);

/// Seeded random zero-mean field, standard normal per point (Box-Muller over
/// mt19937_64, fixed algorithm for cross-platform reproducibility), projected
/// and normalized in L2.
Field random_zero_mean_unit(const Grid& grid, unsigned long seed);

}  // namespace saddle
