#include "saddle/minmode.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

namespace saddle {

namespace {

void require_zero_mean_nonzero(const Field& psi, const char* what) {
    const double nrm = norm_l2(psi);
    if (nrm == 0.0) throw std::invalid_argument(std::string(what) + ": zero field");
    if (std::abs(integrate(psi)) > 1e-10 * nrm)
        throw std::invalid_argument(std::string(what) + ": psi is not zero-mean");
}

using ApplyFn = std::function<Field(const Field&)>;

struct WorkingProblem {
    ApplyFn apply;       // symmetric operator in the working space
    Array precond;       // diagonal-in-Fourier preconditioner multipliers
    double op_scale = 1.0;  // crude upper bound on the operator norm
};

WorkingProblem make_problem(const EnergyModel& model, const Field& phi, Metric metric) {
    const OperatorBackend& backend = model.backend();
    WorkingProblem prob;
    const Array s0 = model.linear_symbol();
    const Array& mlap = backend.neg_laplacian_symbol();
    const double curv_max = model.potential_curvature(phi.values).abs().maxCoeff();
    if (metric == Metric::ProjectedL2) {
        prob.apply = [&model, phi](const Field& x) {
            return project(model.hessian_apply(phi, project(x)));
        };
        prob.precond = (1.0 + s0).inverse();
        prob.op_scale = s0.maxCoeff() + curv_max;
    } else {
        prob.apply = [&model, phi](const Field& w) {
            const OperatorBackend& b = model.backend();
            return b.half_neg_laplacian(model.hessian_apply(phi, b.half_neg_laplacian(w)));
        };
        prob.precond = (1.0 + mlap * s0).inverse();
        prob.op_scale = (mlap * s0).maxCoeff() + curv_max * mlap.maxCoeff();
    }
    prob.precond[0] = 0.0;  // keep iterates on the zero-mean subspace
    return prob;
}

void deflate(Field& x, const Field* d) {
    if (d) x.values -= inner_l2(x, *d) * d->values;
}

}  // namespace

Field random_zero_mean_unit(const Grid& grid, unsigned long seed) {
    std::mt19937_64 gen(seed);
    Field f(grid);
    // fixed Box-Muller over mt19937_64 doubles; std::normal_distribution is
    // implementation-defined and would not reproduce across platforms
    const double denom = 9007199254740992.0;  // 2^53
    for (int i = 0; i < grid.size(); ++i) {
        double u1 = ((gen() >> 11) + 1.0) / (denom + 1.0);
        double u2 = (gen() >> 11) / denom;
        f.values[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    f = project(f);
    f.values /= norm_l2(f);
    return f;
}

double rayleigh_quotient(const EnergyModel& model, const Field& phi, const Field& psi,
                         Metric metric) {
    require_zero_mean_nonzero(psi, "rayleigh_quotient");
    if (metric == Metric::ProjectedL2) {
        const Field hp = project(model.hessian_apply(phi, project(psi)));
        return inner_l2(psi, hp) / inner_l2(psi, psi);
    }
    const Field hpsi = model.hessian_apply(phi, psi);
    return inner_l2(psi, hpsi) / inner_hminus1(model.backend(), psi, psi);
}

static MinModeResult solve_lobpcg(const EnergyModel& model, const Field& phi,
                                  const MinModeOptions& opts, const Field* deflate_dir) {
    const OperatorBackend& backend = model.backend();
    const Grid& grid = model.grid();
    WorkingProblem prob = make_problem(model, phi, opts.metric);

    Field x;
    if (opts.guess) {
        x = project(*opts.guess);
        if (opts.metric == Metric::H1) x = backend.half_inverse_neg_laplacian(x);
    } else {
        x = random_zero_mean_unit(grid, opts.seed);
    }
    deflate(x, deflate_dir);
    double nx = norm_l2(x);
    if (nx < 1e-14) {
        x = random_zero_mean_unit(grid, opts.seed + 1);
        deflate(x, deflate_dir);
        nx = norm_l2(x);
    }
    x.values /= nx;

    // floating-point attainability floor: residuals below eps * ||A|| are not
    // reachable, so the request is clamped rather than reported as a failure
    const double tol_eff =
        std::max(opts.tolerance,
                 64.0 * std::numeric_limits<double>::epsilon() * prob.op_scale);

    Field ax = prob.apply(x);
    double lam = inner_l2(x, ax);
    Field p, ap;
    bool has_p = false;
    double resid = 0.0;
    int it = 0;

    for (it = 0; it < opts.max_iterations; ++it) {
        Field r(grid);
        r.values = ax.values - lam * x.values;
        resid = norm_l2(r);
        if (resid <= tol_eff) break;

        Field w = backend.apply_multiplier(r, prob.precond);
        deflate(w, deflate_dir);
        w.values -= inner_l2(w, x) * x.values;
        const double nw = norm_l2(w);
        if (nw < 1e-14) break;  // preconditioned residual lies in span{x}
        w.values /= nw;
        Field aw = prob.apply(w);

        std::vector<const Field*> basis = {&x, &w};
        std::vector<const Field*> abasis = {&ax, &aw};
        Field p2, ap2;
        if (has_p) {
            const double c1 = inner_l2(p, x), c2 = inner_l2(p, w);
            p2 = Field(grid);
            ap2 = Field(grid);
            p2.values = p.values - c1 * x.values - c2 * w.values;
            ap2.values = ap.values - c1 * ax.values - c2 * aw.values;
            const double np = norm_l2(p2);
            if (np > 1e-8) {
                p2.values /= np;
                ap2.values /= np;
                basis.push_back(&p2);
                abasis.push_back(&ap2);
            }
        }

        const int m = static_cast<int>(basis.size());
        Eigen::MatrixXd gram(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                gram(i, j) = inner_l2(*basis[i], *abasis[j]);
                gram(j, i) = gram(i, j);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const Eigen::VectorXd y = es.eigenvectors().col(0);

        Field xn(grid), axn(grid), pn(grid), apn(grid);
        xn.values.setZero();
        axn.values.setZero();
        pn.values.setZero();
        apn.values.setZero();
        for (int i = 0; i < m; ++i) {
            xn.values += y[i] * basis[i]->values;
            axn.values += y[i] * abasis[i]->values;
            if (i > 0) {
                pn.values += y[i] * basis[i]->values;
                apn.values += y[i] * abasis[i]->values;
            }
        }
        const double npn = norm_l2(pn);
        if (npn > 1e-14) {
            pn.values /= npn;
            apn.values /= npn;
            p = pn;
            ap = apn;
            has_p = true;
        }
        const double nn = norm_l2(xn);
        x.values = xn.values / nn;
        ax.values = axn.values / nn;
        lam = es.eigenvalues()[0];
    }

    MinModeResult res;
    res.eigenvalue = lam;
    res.residual = resid;
    res.iterations = it;
    // final exact projection onto the zero-mean subspace and unit norm
    x = project(x);
    x.values /= norm_l2(x);
    res.eigenvector = opts.metric == Metric::H1 ? backend.half_neg_laplacian(x) : x;
    if (resid > tol_eff) {
        char msg[96];
        std::snprintf(msg, sizeof msg,
                      "min_mode: no convergence within max iterations (residual %.3e)", resid);
        throw MinModeError(msg, std::move(res));
    }
    return res;
}

MinModeResult min_mode(const EnergyModel& model, const Field& phi,
                       const MinModeOptions& opts) {
    return solve_lobpcg(model, phi, opts, nullptr);
}

MinModeResult min_mode_deflated(const EnergyModel& model, const Field& phi,
                                const MinModeOptions& opts, const MinModeResult& first) {
    Field d = first.eigenvector;
    if (opts.metric == Metric::H1)
        d = model.backend().half_inverse_neg_laplacian(project(d));
    d.values /= norm_l2(d);
    MinModeOptions o = opts;
    if (!o.guess) o.seed = opts.seed + 17;
    return solve_lobpcg(model, phi, o, &d);
}

DenseSpectrum dense_oracle(const EnergyModel& model, const Field& phi, Metric metric) {
    const Grid& grid = model.grid();
    const int n = grid.size();
    if (n > 64) throw std::invalid_argument("dense_oracle: grid too large (> 64 points)");
    const OperatorBackend& backend = model.backend();

    // constrained operator assembled column by column
    Eigen::MatrixXd mat(n, n);
    for (int j = 0; j < n; ++j) {
        Field e(grid);
        e.values[j] = 1.0;
        Field col;
        if (metric == Metric::ProjectedL2)
            col = project(model.hessian_apply(phi, project(e)));
        else
            col = backend.half_neg_laplacian(
                model.hessian_apply(phi, backend.half_neg_laplacian(e)));
        mat.col(j) = col.values.matrix();
    }

    // orthonormal basis of the zero-mean subspace from a Householder reflector
    Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    Eigen::VectorXd u = c;
    u[0] -= 1.0;
    u.normalize();
    Eigen::MatrixXd house = Eigen::MatrixXd::Identity(n, n) - 2.0 * u * u.transpose();
    Eigen::MatrixXd q = house.rightCols(n - 1);

    Eigen::MatrixXd constrained = q.transpose() * mat * q;
    constrained = 0.5 * (constrained + constrained.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(constrained);

    DenseSpectrum spec;
    spec.eigenvalues = es.eigenvalues();
    const double scale = 1.0 / std::sqrt(grid.cell_volume());
    for (int k = 0; k < n - 1; ++k) {
        Field v(grid);
        v.values = (q * es.eigenvectors().col(k)).array() * scale;  // unit in L2
        spec.eigenvectors.push_back(std::move(v));
    }
    return spec;
}

}  // namespace saddle
