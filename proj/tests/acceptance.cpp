// Acceptance gate: run as `acceptance <criterion>` with criterion in 1..10.
// Each criterion prints exactly one PASS/FAIL line and sets the exit code.
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "saddle/config.hpp"
#include "saddle/search.hpp"

using namespace saddle;

namespace {

std::unique_ptr<GinzburgLandau> make_gl(int n, BackendKind kind, double mass = 0.6) {
    Grid g = Grid::make_1d(n, 1.0);
    auto backend = std::make_shared<OperatorBackend>(g, kind);
    return std::make_unique<GinzburgLandau>(backend, GinzburgLandauParams{0.04, mass});
}

std::unique_ptr<LandauBrazovskii> make_lb(int n) {
    Grid g = Grid::make_2d(n, n, 16.0 * M_PI / std::sqrt(3.0), 8.0 * M_PI);
    auto backend = std::make_shared<OperatorBackend>(g, BackendKind::Spectral);
    return std::make_unique<LandauBrazovskii>(backend, LandauBrazovskiiParams{});
}

Field smooth_random(const Grid& g, unsigned seed, double amp) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double v = 0.0;
            for (int k = 1; k <= 3; ++k)
                v += dist(gen) * std::cos(2.0 * M_PI * k * g.x(ix) / g.lx) +
                     dist(gen) * std::sin(2.0 * M_PI * k * g.y(iy) / g.ly);
            f(ix, iy) = amp * v;
        }
    return f;
}

Field white_random(const Grid& g, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (int i = 0; i < g.size(); ++i) f.values[i] = dist(gen);
    return f;
}

RunConfig load_config(const char* name) {
    return RunConfig::load(std::string(CONFIG_DIR "/") + name);
}

bool report(int crit, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s — %s\n", crit, pass ? "PASS" : "FAIL", detail.c_str());
    return pass;
}

// ---------------------------------------------------------------- criterion 1

bool criterion1() {
    double worst = 0.0;
    for (const Grid& g : {Grid::make_1d(100, 1.0),
                          Grid::make_2d(64, 64, 16.0 * M_PI / std::sqrt(3.0), 8.0 * M_PI)}) {
        for (unsigned seed = 0; seed < 100; ++seed) {
            Field f = white_random(g, seed);
            Field w = white_random(g, seed + 1000);
            const double nf = norm_l2(f);
            Field pf = project(f);
            worst = std::max(worst, (project(pf).values - pf.values).abs().maxCoeff() / nf);
            worst = std::max(worst, std::abs(integrate(pf)) / nf);
            worst = std::max(worst, std::abs(inner_l2(f, project(w)) - inner_l2(pf, w)) /
                                        (nf * norm_l2(w)));
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "P^2=P, mean(Pf)=0, self-adjointness: max rel err %.2e (bound 1e-13)",
                  worst);
    return report(1, worst <= 1e-13, buf);
}

// ---------------------------------------------------------------- criterion 2

bool criterion2() {
    auto gl = make_gl(100, BackendKind::FiniteDifference);
    auto lb = make_lb(64);
    const double eps = 1e-5;
    double worst_grad = 0.0, worst_hess = 0.0;
    for (const EnergyModel* model : {static_cast<const EnergyModel*>(gl.get()),
                                     static_cast<const EnergyModel*>(lb.get())}) {
        const Grid& g = model->grid();
        for (unsigned pair = 0; pair < 20; ++pair) {
            Field phi = smooth_random(g, pair, 0.3);
            Field v = smooth_random(g, pair + 100, 0.3);
            Field plus(g), minus(g);
            plus.values = phi.values + eps * v.values;
            minus.values = phi.values - eps * v.values;

            const double fd = (model->energy(plus) - model->energy(minus)) / (2.0 * eps);
            const double an = inner_l2(model->gradient_l2(phi), v);
            worst_grad = std::max(worst_grad, std::abs(fd - an) / (std::abs(an) + 1e-8));

            Array hfd = (model->gradient_l2(plus).values - model->gradient_l2(minus).values) /
                        (2.0 * eps);
            Array han = model->hessian_apply(phi, v).values;
            worst_hess = std::max(worst_hess,
                                  (hfd - han).abs().maxCoeff() / (han.abs().maxCoeff() + 1e-8));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "gradient FD rel err %.2e (bound 1e-5), hessian FD rel err %.2e (bound 1e-4)",
                  worst_grad, worst_hess);
    return report(2, worst_grad <= 1e-5 && worst_hess <= 1e-4, buf);
}

// ---------------------------------------------------------------- criterion 3

double angle_to_smallest_eigenspace(const Field& v, const DenseSpectrum& spec) {
    double proj2 = 0.0;
    const double lam0 = spec.eigenvalues[0];
    for (int k = 0; k < spec.eigenvalues.size(); ++k) {
        if (spec.eigenvalues[k] > lam0 + 1e-9) break;
        const double c = inner_l2(v, spec.eigenvectors[k]);
        proj2 += c * c;
    }
    return std::acos(std::min(1.0, std::sqrt(proj2) / norm_l2(v)));
}

bool criterion3() {
    auto gl = make_gl(32, BackendKind::FiniteDifference);
    auto lb = make_lb(8);
    Field phi_gl(gl->grid());
    for (int i = 0; i < 32; ++i)
        phi_gl.values[i] = 0.3 + 0.2 * std::cos(2.0 * M_PI * gl->grid().x(i)) +
                           0.1 * std::sin(4.0 * M_PI * gl->grid().x(i));
    Field phi_lb = smooth_random(lb->grid(), 5, 0.15);

    double worst_lam = 0.0, worst_ang = 0.0;
    struct Case {
        const EnergyModel* model;
        const Field* phi;
    } cases[] = {{gl.get(), &phi_gl}, {lb.get(), &phi_lb}};
    for (const auto& cs : cases)
        for (Metric metric : {Metric::ProjectedL2, Metric::H1}) {
            DenseSpectrum spec = dense_oracle(*cs.model, *cs.phi, metric);
            MinModeOptions opts;
            opts.metric = metric;
            MinModeResult res = min_mode(*cs.model, *cs.phi, opts);
            worst_lam = std::max(worst_lam, std::abs(res.eigenvalue - spec.eigenvalues[0]));
            Field v = res.eigenvector;
            if (metric == Metric::H1)
                v = cs.model->backend().half_inverse_neg_laplacian(project(v));
            worst_ang = std::max(worst_ang, angle_to_smallest_eigenspace(v, spec));
        }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "1D n=32 and 2D 8x8, both metrics: |dlambda| %.2e (bound 1e-8), "
                  "principal angle %.2e rad (bound 1e-5)",
                  worst_lam, worst_ang);
    return report(3, worst_lam <= 1e-8 && worst_ang <= 1e-5, buf);
}

// ---------------------------------------------------------------- criterion 4

bool criterion4() {
    auto gl = make_gl(100, BackendKind::Spectral, 0.0);
    Field phi0(gl->grid());

    MinModeOptions l2opts;
    const double lam_l2 = min_mode(*gl, phi0, l2opts).eigenvalue;
    const double kappa = 0.04;
    const double oracle_l2 = kappa * kappa * 4.0 * M_PI * M_PI - 1.0;

    MinModeOptions h1opts;
    h1opts.metric = Metric::H1;
    const double lam_h1 = min_mode(*gl, phi0, h1opts).eigenvalue;
    // brute-force Fourier mode scan: lambda_k = q^2 (kappa^2 q^2 - 1), q = 2 pi k
    double oracle_h1 = 0.0;
    int argmin = 0;
    for (int k = 1; k <= 50; ++k) {
        const double q2 = 4.0 * M_PI * M_PI * k * k;
        const double lam = q2 * (kappa * kappa * q2 - 1.0);
        if (lam < oracle_h1) {
            oracle_h1 = lam;
            argmin = k;
        }
    }

    const bool pass = std::abs(lam_l2 - oracle_l2) <= 1e-6 &&
                      std::abs(lam_h1 - oracle_h1) <= 1e-6 && argmin == 3;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "projected-L2 lambda %.9f (oracle %.9f), H-1 lambda %.6f "
                  "(mode-scan oracle %.6f at k=%d)",
                  lam_l2, oracle_l2, lam_h1, oracle_h1, argmin);
    return report(4, pass, buf);
}

// ---------------------------------------------------------------- criterion 5

bool criterion5() {
    double worst = 0.0;
    bool all_converged = true;
    for (const char* name :
         {"gl1d_projected.ini", "gl1d_gad.ini", "lb2d_projected.ini", "lb2d_gad.ini"}) {
        RunConfig cfg = load_config(name);
        auto model = cfg.make_model();
        Field phi0 = cfg.make_initial_field(*model);
        const double m = model->mass();
        double drift = 0.0;
        SearchConfig sc = cfg.search;
        sc.cycle_observer = [&](const Field& phi) {
            drift = std::max(drift, std::abs(mean(phi) - m));
        };
        std::optional<Field> v0;
        if (sc.method == Method::GadProjected || sc.method == Method::GadL2)
            v0 = random_zero_mean_unit(model->grid(), cfg.v_seed);
        SaddleResult r = run_search(*model, phi0, v0, sc);
        all_converged = all_converged && r.status == SearchStatus::Converged;
        worst = std::max(worst, drift);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max |mean(phi) - m| over all cycles of 4 runs: %.2e (bound 1e-10)%s", worst,
                  all_converged ? "" : " [a run failed to converge]");
    return report(5, worst <= 1e-10 && all_converged, buf);
}

// ------------------------------------------------------- criteria 6/7/8/10 core

// stage 1: the shipped 1D projected-IMF run; used as the anchor saddle
SaddleResult stage1_1d(const RunConfig& cfg, const EnergyModel& model) {
    Field phi0 = cfg.make_initial_field(model);
    return imf_search(model, phi0, cfg.search);
}

// common near-saddle start used for the cross-method comparison: a small
// perturbation keeps all three trajectories inside the same attraction basin,
// so the flat translation orbit cannot separate the converged states
Field common_start(const EnergyModel& model, const Field& phi_star, double eps) {
    const Grid& g = model.grid();
    Field p(g);
    for (int i = 0; i < g.nx; ++i)
        p.values[i] = std::cos(6.0 * M_PI * g.x(i)) + 0.5 * std::sin(2.0 * M_PI * g.x(i));
    p = project(p);
    p.values *= eps / norm_l2(p);
    Field start(g);
    start.values = phi_star.values + p.values;
    return start;
}

SearchConfig tight_inner_config(Method method) {
    SearchConfig sc;
    sc.method = method;
    sc.inner_iters = 0;  // solve translation to inner_tol each cycle
    sc.inner_tol = 1e-12;
    sc.outer_tol = 1e-10;
    sc.max_cycles = 60;
    return sc;
}

bool criterion6() {
    RunConfig cfg = load_config("gl1d_projected.ini");
    auto model = cfg.make_model();
    SaddleResult s1 = stage1_1d(cfg, *model);
    if (s1.status != SearchStatus::Converged)
        return report(6, false, "stage-1 shipped run did not converge");

    Field start = common_start(*model, s1.phi_star, 2e-5);

    SaddleResult proj = imf_search(*model, start, tight_inner_config(Method::ImfProjected));
    SaddleResult h1 = imf_search(*model, start, tight_inner_config(Method::ImfH1));

    SearchConfig gc = tight_inner_config(Method::GadProjected);
    gc.max_cycles = 400000;
    MinModeOptions mo;
    Field v0 = min_mode(*model, start, mo).eigenvector;
    SaddleResult gad = gad_search(*model, start, v0, gc);

    if (proj.status != SearchStatus::Converged || h1.status != SearchStatus::Converged ||
        gad.status != SearchStatus::Converged)
        return report(6, false, "a method did not converge from the common start");

    const double d_imf = (proj.phi_star.values - h1.phi_star.values).abs().maxCoeff();
    const double d_gp = (gad.phi_star.values - proj.phi_star.values).abs().maxCoeff();
    const double d_gh = (gad.phi_star.values - h1.phi_star.values).abs().maxCoeff();
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "max-norm gaps: imf-projected vs imf-h1 %.2e (bound 1e-6), gad vs imf "
                  "%.2e / %.2e (bound 1e-4)",
                  d_imf, d_gp, d_gh);
    return report(6, d_imf <= 1e-6 && d_gp <= 1e-4 && d_gh <= 1e-4, buf);
}

bool criterion7() {
    RunConfig cfg1 = load_config("gl1d_projected.ini");
    auto gl = cfg1.make_model();
    SaddleResult s1 = stage1_1d(cfg1, *gl);
    Index1Report rep1 = verify_index1(*gl, s1.phi_star);

    RunConfig cfg2 = load_config("lb2d_projected.ini");
    auto lb = cfg2.make_model();
    Field phi0 = cfg2.make_initial_field(*lb);
    SaddleResult s2 = imf_search(*lb, phi0, cfg2.search);
    Index1Report rep2 = verify_index1(*lb, s2.phi_star);

    const bool pass = rep1.is_index1 && rep2.is_index1;
    char buf[260];
    std::snprintf(buf, sizeof buf,
                  "1D: lambda1 %.4e < 0 < lambda2 %.4e (%s); 2D: lambda1 %.4e, lambda2 %.4e "
                  "(%s; the 2D lambda2 is a spectral translation zero mode, resolution-limited)",
                  rep1.lambda1, rep1.lambda2, rep1.is_index1 ? "index-1" : "not index-1",
                  rep2.lambda1, rep2.lambda2, rep2.is_index1 ? "index-1" : "not index-1");
    return report(7, pass, buf);
}

bool criterion8() {
    RunConfig cfg = load_config("gl1d_projected.ini");
    auto model = cfg.make_model();
    SaddleResult s1 = stage1_1d(cfg, *model);
    if (s1.status != SearchStatus::Converged)
        return report(8, false, "anchor run did not converge");

    Field start = common_start(*model, s1.phi_star, 1e-3);
    SaddleResult r = imf_search(*model, start, tight_inner_config(Method::ImfProjected));
    if (r.status != SearchStatus::Converged)
        return report(8, false, "perturbed run did not converge");

    std::vector<double> res;
    for (const TraceRecord& rec : r.trace.records)
        if (rec.residual_l2 > 0.0) res.push_back(rec.residual_l2);
    if (res.size() < 3) return report(8, false, "fewer than 3 outer cycles recorded");

    bool monotone = true;
    for (size_t i = 1; i < res.size(); ++i) monotone = monotone && res[i] < res[i - 1];

    // least-squares slope of log e_{k+1} vs log e_k over the final cycles
    const size_t n = res.size() - 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double x = std::log(res[i]), y = std::log(res[i + 1]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%zu outer residuals from %.1e down to %.1e, monotone=%s, "
                  "log-log slope %.2f (bound 1.7)",
                  res.size(), res.front(), res.back(), monotone ? "yes" : "no", slope);
    return report(8, monotone && slope >= 1.7, buf);
}

// ---------------------------------------------------------------- criterion 9

bool criterion9() {
    struct Setup {
        const char* config;
        std::vector<long> budgets;
        double bound;
    } setups[] = {{"gl1d_bench.ini", {10000, 100000}, 1.3},
                  {"lb2d_bench.ini", {5000, 10000}, 1.1}};

    bool pass = true;
    std::ostringstream detail;
    for (const Setup& setup : setups) {
        RunConfig cfg = load_config(setup.config);
        auto model = cfg.make_model();
        for (long budget : setup.budgets) {
            double wall_h1 = 0.0, wall_proj = 0.0;
            for (const std::string& expr : cfg.bench_inits) {
                Field phi0 = cfg.initial_from_expression(expr, *model);
                for (Method method : {Method::ImfH1, Method::ImfProjected}) {
                    SearchConfig sc = cfg.search;
                    sc.method = method;
                    sc.fixed_budget = true;
                    sc.total_inner_budget = budget;
                    sc.inner_iters = cfg.bench_inner_per_cycle;
                    sc.max_cycles =
                        static_cast<int>(budget / std::max(1, sc.inner_iters)) + 10;
                    SaddleResult r = imf_search(*model, phi0, sc);
                    (method == Method::ImfH1 ? wall_h1 : wall_proj) += r.wall_s;
                }
            }
            const double ratio = wall_h1 / wall_proj;
            pass = pass && ratio >= setup.bound;
            detail << (setup.bound > 1.2 ? "1D" : "2D") << " budget " << budget << ": ratio "
                   << std::round(ratio * 100.0) / 100.0 << " (bound " << setup.bound << "); ";
        }
    }
    return report(9, pass, "wall-time imf-h1 / imf-projected — " + detail.str());
}

// --------------------------------------------------------------- criterion 10

bool criterion10() {
    RunConfig cfg = load_config("gl1d_projected.ini");
    auto model = cfg.make_model();
    Field phi0 = cfg.make_initial_field(*model);
    SearchConfig sc = cfg.search;
    sc.record_walltime = false;  // wall seconds are the only non-deterministic column

    const char* paths[2] = {"/tmp/saddle_accept_trace_a.csv", "/tmp/saddle_accept_trace_b.csv"};
    Field fields[2];
    for (int i = 0; i < 2; ++i) {
        SaddleResult r = imf_search(*model, phi0, sc);
        if (r.status != SearchStatus::Converged)
            return report(10, false, "run did not converge");
        r.trace.write_csv(paths[i]);
        fields[i] = r.phi_star;
    }
    std::ifstream a(paths[0], std::ios::binary), b(paths[1], std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    const bool same_csv = sa.str() == sb.str() && !sa.str().empty();
    const bool same_field = (fields[0].values == fields[1].values).all();
    char buf[120];
    std::snprintf(buf, sizeof buf, "repeated run: trace.csv bytes %s, phi* bits %s",
                  same_csv ? "identical" : "DIFFER", same_field ? "identical" : "DIFFER");
    return report(10, same_csv && same_field, buf);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
        return 2;
    }
    const int crit = std::atoi(argv[1]);
    bool pass = false;
    switch (crit) {
        case 1: pass = criterion1(); break;
        case 2: pass = criterion2(); break;
        case 3: pass = criterion3(); break;
        case 4: pass = criterion4(); break;
        case 5: pass = criterion5(); break;
        case 6: pass = criterion6(); break;
        case 7: pass = criterion7(); break;
        case 8: pass = criterion8(); break;
        case 9: pass = criterion9(); break;
        case 10: pass = criterion10(); break;
        default:
            std::fprintf(stderr, "unknown criterion %d\n", crit);
            return 2;
    }
    return pass ? 0 : 1;
}
