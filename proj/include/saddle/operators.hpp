#pragma once

#include <memory>
#include <vector>

#include "saddle/grid.hpp"

namespace saddle {

enum class BackendKind { FiniteDifference, Spectral };

/// Discrete periodic differential operators on a fixed grid.
///
/// Both backends apply operators through the discrete Fourier basis; they
/// differ only in the per-mode multiplier table for -Laplacian:
///   spectral:           |q_k|^2 with q_k = 2*pi*k/L per axis
///   finite-difference:  sum over axes of (2 - 2*cos(2*pi*k/n))/h^2
/// The zero mode of -Laplacian is exactly 0 in both cases, so the inverse on
/// zero-mean fields is the pseudoinverse in the operator's own eigenbasis.
class OperatorBackend {
public:
    OperatorBackend(const Grid& grid, BackendKind kind);

    const Grid& grid() const { return grid_; }
    BackendKind kind() const { return kind_; }

    /// Per-mode multiplier of -Laplacian (size grid.size(), kx fastest).
    const Array& neg_laplacian_symbol() const { return neg_lap_; }

    /// Per-mode multiplier of (Laplacian + 1)^2, spectral only.
    const Array& biharmonic_shifted_symbol() const;

    /// Applies a diagonal-in-Fourier operator given its multiplier table.
    Field apply_multiplier(const Field& f, const Array& m) const;

    Field laplacian(const Field& f) const;
    Field biharmonic_shifted(const Field& f) const;

    /// (-Laplacian)^{-1} on zero-mean fields; zero mode mapped to 0.
    /// Throws if |integrate(f)| > 1e-10 * ||f||.
    Field inverse_neg_laplacian(const Field& f) const;

    /// (-Laplacian)^{+1/2} and (-Laplacian)^{-1/2} on zero-mean fields.
    Field half_neg_laplacian(const Field& f) const;
    Field half_inverse_neg_laplacian(const Field& f) const;

private:
    Grid grid_;
    BackendKind kind_;
    Array neg_lap_;
    Array biharm1_;
    Array inv_neg_lap_;
    Array half_neg_lap_;
    Array half_inv_neg_lap_;
    // FFT plan and scratch space; a backend instance is confined to one
    // search context (see module concurrency notes).
    struct FftScratch;
    std::shared_ptr<FftScratch> scratch_;
};

/// Orthogonal projection onto zero-mean fields: f - mean(f).
Field project(const Field& f);

/// H^{-1} inner product <(-Lap)^{-1} f, g>_{L2}; both inputs zero-mean.
double inner_hminus1(const OperatorBackend& backend, const Field& f, const Field& g);

double norm_hminus1(const OperatorBackend& backend, const Field& f);

}  // namespace saddle
