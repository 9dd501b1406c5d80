#include "saddle/operators.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace saddle {

namespace {

// Integer wavenumber for DFT index k on an axis with n points: k in [-n/2, n/2).
int wavenumber(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace

struct OperatorBackend::FftScratch {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec, a, b;
};

OperatorBackend::OperatorBackend(const Grid& grid, BackendKind kind)
    : grid_(grid), kind_(kind) {
    const int nx = grid.nx, ny = grid.ny;
    const int n = grid.size();
    neg_lap_.resize(n);
    if (kind == BackendKind::Spectral) biharm1_.resize(n);

    for (int ky = 0; ky < ny; ++ky) {
        for (int kx = 0; kx < nx; ++kx) {
            const int i = ky * nx + kx;
            double m;
            if (kind == BackendKind::Spectral) {
                const double qx = 2.0 * M_PI * wavenumber(kx, nx) / grid.lx;
                const double qy = grid.ndim == 2 ? 2.0 * M_PI * wavenumber(ky, ny) / grid.ly : 0.0;
                const double q2 = qx * qx + qy * qy;
                m = q2;
                biharm1_[i] = (1.0 - q2) * (1.0 - q2);
            } else {
                const double hx = grid.hx();
                m = (2.0 - 2.0 * std::cos(2.0 * M_PI * kx / nx)) / (hx * hx);
                if (grid.ndim == 2) {
                    const double hy = grid.hy();
                    m += (2.0 - 2.0 * std::cos(2.0 * M_PI * ky / ny)) / (hy * hy);
                }
            }
            neg_lap_[i] = m;
        }
    }
    neg_lap_[0] = 0.0;  // zero mode exactly annihilated

    inv_neg_lap_ = Array::Zero(n);
    half_neg_lap_ = Array::Zero(n);
    half_inv_neg_lap_ = Array::Zero(n);
    for (int i = 1; i < n; ++i) {
        inv_neg_lap_[i] = 1.0 / neg_lap_[i];
        half_neg_lap_[i] = std::sqrt(neg_lap_[i]);
        half_inv_neg_lap_[i] = 1.0 / half_neg_lap_[i];
    }
    scratch_ = std::make_shared<FftScratch>();
}

const Array& OperatorBackend::biharmonic_shifted_symbol() const {
    if (kind_ != BackendKind::Spectral)
        throw std::runtime_error("biharmonic_shifted: unsupported backend (finite-difference)");
    return biharm1_;
}

Field OperatorBackend::apply_multiplier(const Field& f, const Array& m) const {
    if (f.grid != grid_) throw std::invalid_argument("apply_multiplier: field on wrong grid");
    using C = std::complex<double>;
    const int nx = grid_.nx, ny = grid_.ny;
    FftScratch& s = *scratch_;
    s.spec.resize(grid_.size());

    if (grid_.ndim == 1) {
        s.a.resize(nx);
        for (int i = 0; i < nx; ++i) s.a[i] = f.values[i];
        s.fft.fwd(s.spec, s.a);
    } else {
        // rows (x direction), then columns (y direction)
        s.a.resize(nx);
        s.b.resize(nx);
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) s.a[ix] = f.values[iy * nx + ix];
            s.fft.fwd(s.b, s.a);
            for (int ix = 0; ix < nx; ++ix) s.spec[iy * nx + ix] = s.b[ix];
        }
        s.a.resize(ny);
        s.b.resize(ny);
        for (int ix = 0; ix < nx; ++ix) {
            for (int iy = 0; iy < ny; ++iy) s.a[iy] = s.spec[iy * nx + ix];
            s.fft.fwd(s.b, s.a);
            for (int iy = 0; iy < ny; ++iy) s.spec[iy * nx + ix] = s.b[iy];
        }
    }

    for (int i = 0; i < grid_.size(); ++i) s.spec[i] *= m[i];

    Field out(grid_);
    if (grid_.ndim == 1) {
        s.a.resize(nx);
        s.fft.inv(s.a, s.spec);
        for (int i = 0; i < nx; ++i) out.values[i] = s.a[i].real();
    } else {
        s.a.resize(ny);
        s.b.resize(ny);
        for (int ix = 0; ix < nx; ++ix) {
            for (int iy = 0; iy < ny; ++iy) s.a[iy] = s.spec[iy * nx + ix];
            s.fft.inv(s.b, s.a);
            for (int iy = 0; iy < ny; ++iy) s.spec[iy * nx + ix] = s.b[iy];
        }
        s.a.resize(nx);
        s.b.resize(nx);
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) s.a[ix] = s.spec[iy * nx + ix];
            s.fft.inv(s.b, s.a);
            for (int ix = 0; ix < nx; ++ix) out.values[iy * nx + ix] = s.b[ix].real();
        }
    }
    return out;
}

Field OperatorBackend::laplacian(const Field& f) const {
    Field out = apply_multiplier(f, neg_lap_);
    out.values = -out.values;
    return out;
}

Field OperatorBackend::biharmonic_shifted(const Field& f) const {
    return apply_multiplier(f, biharmonic_shifted_symbol());
}

static void require_zero_mean(const Field& f, const char* what) {
    const double nrm = norm_l2(f);
    if (std::abs(integrate(f)) > 1e-10 * std::max(nrm, 1e-300))
        throw std::invalid_argument(std::string(what) +
                                    ": input violates zero-mean precondition");
}

Field OperatorBackend::inverse_neg_laplacian(const Field& f) const {
    require_zero_mean(f, "inverse_neg_laplacian");
    return apply_multiplier(f, inv_neg_lap_);
}

Field OperatorBackend::half_neg_laplacian(const Field& f) const {
    return apply_multiplier(f, half_neg_lap_);
}

Field OperatorBackend::half_inverse_neg_laplacian(const Field& f) const {
    require_zero_mean(f, "half_inverse_neg_laplacian");
    return apply_multiplier(f, half_inv_neg_lap_);
}

Field project(const Field& f) {
    Field out = f;
    out.values -= mean(f);
    return out;
}

double inner_hminus1(const OperatorBackend& backend, const Field& f, const Field& g) {
    require_same_grid(f, g);
    require_zero_mean(f, "inner_hminus1");
    require_zero_mean(g, "inner_hminus1");
    return inner_l2(backend.inverse_neg_laplacian(f), g);
}

double norm_hminus1(const OperatorBackend& backend, const Field& f) {
    return std::sqrt(inner_hminus1(backend, f, f));
}

}  // namespace saddle
