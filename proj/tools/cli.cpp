#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "saddle/config.hpp"
#include "saddle/search.hpp"

namespace fs = std::filesystem;
using namespace saddle;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDiverged = 3;

void write_summary(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
    RunConfig cfg = RunConfig::load(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    auto model = cfg.make_model();
    Field phi0 = cfg.make_initial_field(*model);
    std::optional<Field> v0;
    if (cfg.search.method == Method::GadProjected || cfg.search.method == Method::GadL2)
        v0 = random_zero_mean_unit(model->grid(), cfg.v_seed);

    SaddleResult result = run_search(*model, phi0, v0, cfg.search);

    fs::create_directories(cfg.out_dir);
    if (cfg.emit_fields) {
        write_field(result.phi_star, cfg.out_dir + "/phi_star.field");
        write_field(result.v_star, cfg.out_dir + "/v_star.field");
    }
    if (cfg.emit_trace) result.trace.write_csv(cfg.out_dir + "/trace.csv");

    const double res = result.phi_star.finite() ? residual_l2(*model, result.phi_star)
                                                : std::nan("");
    std::string index_info = "lambda1 = n/a\nlambda2 = n/a\n";
    if (result.status == SearchStatus::Converged) {
        Index1Report rep = verify_index1(*model, result.phi_star, cfg.search.minmode_tol,
                                         cfg.v_seed);
        char buf[128];
        std::snprintf(buf, sizeof buf, "lambda1 = %.12e\nlambda2 = %.12e\n", rep.lambda1,
                      rep.lambda2);
        index_info = buf;
    }
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "status = %s\nresidual_l2 = %.12e\nenergy = %.12e\nmass = %.12e\n"
                  "cycles = %zu\ninner_iters_total = %ld\nwall_s = %.6f\n",
                  status_to_string(result.status).c_str(), res,
                  result.phi_star.finite() ? model->energy(result.phi_star) : std::nan(""),
                  mean(result.phi_star), result.trace.records.size(),
                  result.total_inner_iters, result.wall_s);
    const std::string summary = std::string(buf) + index_info;
    std::fputs(summary.c_str(), stdout);
    write_summary(cfg.out_dir + "/summary.txt", summary);

    if (result.status == SearchStatus::Diverged) return kExitDiverged;
    return result.status == SearchStatus::Converged ? 0 : 1;
}

int cmd_bench(const std::string& config_path, const std::string& out_override, int jobs) {
    (void)jobs;  // cells always execute exclusively so timings stay clean
    RunConfig cfg = RunConfig::load(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (cfg.bench_iters.empty()) throw ConfigError("bench: [bench] iters is required");
    if (cfg.bench_inits.empty()) throw ConfigError("bench: at least one [bench] init required");
    auto model = cfg.make_model();

    fs::create_directories(cfg.out_dir);
    std::FILE* out = std::fopen((cfg.out_dir + "/bench.csv").c_str(), "w");
    std::FILE* sp = std::fopen((cfg.out_dir + "/speedup.csv").c_str(), "w");
    if (!out || !sp) throw std::runtime_error("bench: cannot open output CSVs");
    std::fprintf(out, "init,method,iterN,wall_s\n");
    std::fprintf(sp, "init,iterN,wall_imf_h1,wall_imf_projected,speedup\n");

    const Method methods[2] = {Method::ImfH1, Method::ImfProjected};
    for (size_t ii = 0; ii < cfg.bench_inits.size(); ++ii) {
        const std::string label = "phi0" + std::to_string(ii + 1);
        Field phi0 = cfg.initial_from_expression(cfg.bench_inits[ii], *model);
        for (long budget : cfg.bench_iters) {
            double walls[2] = {0, 0};
            for (int mi = 0; mi < 2; ++mi) {
                SearchConfig sc = cfg.search;
                sc.method = methods[mi];
                sc.fixed_budget = true;
                sc.total_inner_budget = budget;
                sc.inner_iters = cfg.bench_inner_per_cycle;
                sc.max_cycles = budget > 0
                                    ? static_cast<int>(budget / std::max(1, sc.inner_iters)) + 10
                                    : 2;
                SaddleResult r = imf_search(*model, phi0, sc);
                if (r.total_inner_iters != (budget > 0 ? budget : 0))
                    std::fprintf(stderr, "bench: warning: %s executed %ld of %ld steps\n",
                                 method_to_string(sc.method).c_str(), r.total_inner_iters,
                                 budget);
                walls[mi] = r.wall_s;
                std::fprintf(out, "%s,%s,%ld,%.6f\n", label.c_str(),
                             method_to_string(sc.method).c_str(), budget, r.wall_s);
            }
            if (budget > 0)
                std::fprintf(sp, "%s,%ld,%.6f,%.6f,%.4f\n", label.c_str(), budget, walls[0],
                             walls[1], walls[0] / walls[1]);
            std::printf("%s iterN=%ld: imf-h1 %.3fs, imf-projected %.3fs\n", label.c_str(),
                        budget, walls[0], walls[1]);
        }
    }
    std::fclose(out);
    std::fclose(sp);
    return 0;
}

int cmd_verify(const std::string& field_path, const std::string& config_path) {
    RunConfig cfg = RunConfig::load(config_path);
    auto model = cfg.make_model();
    Field phi = read_field(field_path);
    if (phi.grid != model->grid()) {
        std::fprintf(stderr, "verify: field grid does not match config grid\n");
        return kExitConfigError;
    }
    Index1Report rep = verify_index1(*model, phi, cfg.search.minmode_tol, cfg.v_seed);
    std::printf("residual_l2 = %.12e\nlambda1 = %.12e\nlambda2 = %.12e\nis_index1 = %s\n"
                "degenerate = %s\nmass = %.12e\n",
                rep.residual, rep.lambda1, rep.lambda2, rep.is_index1 ? "true" : "false",
                rep.degenerate ? "true" : "false", mean(phi));
    return rep.is_index1 && rep.residual <= cfg.search.outer_tol ? 0 : 1;
}

int cmd_minmode(const std::string& config_path, const std::string& metric_str,
                const std::string& out_override) {
    RunConfig cfg = RunConfig::load(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    auto model = cfg.make_model();
    Field phi = cfg.make_initial_field(*model);

    MinModeOptions opts;
    opts.tolerance = cfg.search.minmode_tol;
    opts.max_iterations = cfg.search.minmode_max_iters;
    opts.seed = cfg.v_seed;
    if (metric_str == "projected-l2") opts.metric = Metric::ProjectedL2;
    else if (metric_str == "h-1") opts.metric = Metric::H1;
    else throw ConfigError("minmode: unknown metric '" + metric_str + "'");

    MinModeResult res;
    try {
        res = min_mode(*model, phi, opts);
    } catch (const MinModeError& e) {
        std::fprintf(stderr, "minmode: %s\n", e.what());
        return kExitDiverged;
    }
    fs::create_directories(cfg.out_dir);
    write_field(res.eigenvector, cfg.out_dir + "/min_mode.field");
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "metric = %s\neigenvalue = %.12e\nresidual = %.3e\niterations = %d\n",
                  metric_str.c_str(), res.eigenvalue, res.residual, res.iterations);
    std::fputs(buf, stdout);
    write_summary(cfg.out_dir + "/minmode_summary.txt", buf);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saddle-point search for mass-conserving phase-field energies"};
    app.require_subcommand(1);

    std::string config_path, out_dir, field_path, metric = "projected-l2";
    int jobs = 1;

    CLI::App* run = app.add_subcommand("run", "run a configured saddle search");
    run->add_option("--config", config_path)->required();
    run->add_option("--out", out_dir);

    CLI::App* bench = app.add_subcommand("bench", "timing comparison imf-h1 vs imf-projected");
    bench->add_option("--config", config_path)->required();
    bench->add_option("--out", out_dir);
    bench->add_option("--jobs", jobs);

    CLI::App* verify = app.add_subcommand("verify", "check a field for the index-1 property");
    verify->add_option("--field", field_path)->required();
    verify->add_option("--config", config_path)->required();

    CLI::App* minmode = app.add_subcommand("minmode", "smallest constrained eigenpair");
    minmode->add_option("--config", config_path)->required();
    minmode->add_option("--metric", metric)->check(CLI::IsMember({"projected-l2", "h-1"}));
    minmode->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir);
        if (bench->parsed()) return cmd_bench(config_path, out_dir, jobs);
        if (verify->parsed()) return cmd_verify(field_path, config_path);
        if (minmode->parsed()) return cmd_minmode(config_path, metric, out_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDiverged;
    }
    return 0;
}
