#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "saddle/energy.hpp"
#include "saddle/search.hpp"

namespace saddle {

/// Evaluate an initial-field expression on a grid. The grammar is closed:
/// numeric constants, `x`, `y`, `pi`, `sin`, `cos`, `+ - * /`, parentheses
/// and unary minus. Anything richer must come from a field file.
Field evaluate_expression(const std::string& expr, const Grid& grid);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `[section] key = value` run configuration.
struct RunConfig {
    // [model]
    std::string model_name = "gl1d";  // gl1d | lb2d
    std::string backend = "";         // fd | spectral; empty = model default
    int nx = 0, ny = 0;               // 0 = model default
    double lx = 0.0, ly = 0.0;        // 0 = model default
    GinzburgLandauParams gl;
    LandauBrazovskiiParams lb;

    // [method]
    SearchConfig search;

    // [init]
    std::string phi_expr;             // initial-field expression, or
    std::string phi_file;             // path to a field file
    unsigned long v_seed = 1;

    // [output]
    std::string out_dir = "out";
    bool emit_fields = true;
    bool emit_trace = true;

    // [bench]
    std::vector<long> bench_iters;
    std::vector<std::string> bench_inits;  // expressions, one per initial state
    int bench_inner_per_cycle = 100;

    static RunConfig load(const std::string& path);  // throws ConfigError

    Grid make_grid() const;
    std::shared_ptr<OperatorBackend> make_backend(const Grid& g) const;
    std::unique_ptr<EnergyModel> make_model() const;

    /// Initial field from expression or file; enforces grid match and
    /// |mean(phi0) - mass| <= 1e-12.
    Field make_initial_field(const EnergyModel& model) const;
    Field initial_from_expression(const std::string& expr, const EnergyModel& model) const;
};

}  // namespace saddle
