#include "saddle/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace saddle {

// ---------------------------------------------------------------------------
// expression grammar: expr := term (('+'|'-') term)*
//                     term := factor (('*'|'/') factor)*
//                     factor := number | 'x' | 'y' | 'pi'
//                             | ('sin'|'cos') '(' expr ')'
//                             | '(' expr ')' | '-' factor
// ---------------------------------------------------------------------------

namespace {

struct ExprParser {
    const std::string& src;
    size_t pos = 0;
    double x = 0.0, y = 0.0;

    explicit ExprParser(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw ConfigError("expression error at position " + std::to_string(pos) + ": " + what +
                          " in '" + src + "'");
    }

    double parse_expr() {
        double v = parse_term();
        for (;;) {
            if (eat('+'))
                v += parse_term();
            else if (eat('-'))
                v -= parse_term();
            else
                return v;
        }
    }

    double parse_term() {
        double v = parse_factor();
        for (;;) {
            if (eat('*'))
                v *= parse_factor();
            else if (eat('/'))
                v /= parse_factor();
            else
                return v;
        }
    }

    double parse_factor() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end");
        const char c = src[pos];
        if (c == '-') {
            ++pos;
            return -parse_factor();
        }
        if (c == '(') {
            ++pos;
            double v = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t end = 0;
            double v;
            try {
                v = std::stod(src.substr(pos), &end);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos += end;
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos]))) ++pos;
            const std::string name = src.substr(start, pos - start);
            if (name == "x") return x;
            if (name == "y") return y;
            if (name == "pi") return M_PI;
            if (name == "sin" || name == "cos") {
                if (!eat('(')) fail("expected '(' after " + name);
                double v = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return name == "sin" ? std::sin(v) : std::cos(v);
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    double eval(double px, double py) {
        pos = 0;
        x = px;
        y = py;
        double v = parse_expr();
        skip_ws();
        if (pos != src.size()) fail("trailing input");
        return v;
    }
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t end;
        double d = std::stod(v, &end);
        if (end != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

long to_long(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d)) throw ConfigError("config: expected integer for '" + key + "'");
    return static_cast<long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

}  // namespace

Field evaluate_expression(const std::string& expr, const Grid& grid) {
    ExprParser p(expr);
    Field f(grid);
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            f.values[iy * grid.nx + ix] = p.eval(grid.x(ix), grid.ndim == 2 ? grid.y(iy) : 0.0);
    if (!f.finite()) throw ConfigError("expression produced non-finite values: " + expr);
    return f;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    int bench_init_count = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (section == "model") {
            if (key == "name") cfg.model_name = value;
            else if (key == "backend") cfg.backend = value;
            else if (key == "nx") cfg.nx = static_cast<int>(to_long(key, value));
            else if (key == "ny") cfg.ny = static_cast<int>(to_long(key, value));
            else if (key == "lx") cfg.lx = to_double(key, value);
            else if (key == "ly") cfg.ly = to_double(key, value);
            else if (key == "kappa") cfg.gl.kappa = to_double(key, value);
            else if (key == "tau") cfg.lb.tau = to_double(key, value);
            else if (key == "xi") cfg.lb.xi = to_double(key, value);
            else if (key == "gamma") cfg.lb.gamma = to_double(key, value);
            else if (key == "mass") { cfg.gl.mass = to_double(key, value); cfg.lb.mass = cfg.gl.mass; }
            else throw ConfigError("config: unknown key [model] " + key);
        } else if (section == "method") {
            if (key == "method") cfg.search.method = method_from_string(value);
            else if (key == "alpha") cfg.search.alpha = to_double(key, value);
            else if (key == "beta") cfg.search.beta = to_double(key, value);
            else if (key == "dt") cfg.search.dt = to_double(key, value);
            else if (key == "inner_iters") cfg.search.inner_iters = static_cast<int>(to_long(key, value));
            else if (key == "inner_tol") cfg.search.inner_tol = to_double(key, value);
            else if (key == "outer_tol") cfg.search.outer_tol = to_double(key, value);
            else if (key == "max_cycles") cfg.search.max_cycles = static_cast<int>(to_long(key, value));
            else if (key == "gad_gamma") cfg.search.gad_gamma = to_double(key, value);
            else if (key == "stabilization") cfg.search.stabilization = to_double(key, value);
            else if (key == "seed") cfg.search.seed = static_cast<unsigned long>(to_long(key, value));
            else if (key == "minmode_tol") cfg.search.minmode_tol = to_double(key, value);
            else if (key == "minmode_max_iters") cfg.search.minmode_max_iters = static_cast<int>(to_long(key, value));
            else throw ConfigError("config: unknown key [method] " + key);
        } else if (section == "init") {
            if (key == "phi") cfg.phi_expr = value;
            else if (key == "phi_file") cfg.phi_file = value;
            else if (key == "v_seed") cfg.v_seed = static_cast<unsigned long>(to_long(key, value));
            else throw ConfigError("config: unknown key [init] " + key);
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = value;
            else if (key == "emit_fields") cfg.emit_fields = to_bool(key, value);
            else if (key == "emit_trace") cfg.emit_trace = to_bool(key, value);
            else if (key == "record_walltime") cfg.search.record_walltime = to_bool(key, value);
            else throw ConfigError("config: unknown key [output] " + key);
        } else if (section == "bench") {
            if (key == "iters") {
                for (const std::string& s : split(value, ','))
                    cfg.bench_iters.push_back(to_long(key, s));
            } else if (key == "inner_per_cycle") {
                cfg.bench_inner_per_cycle = static_cast<int>(to_long(key, value));
            } else if (key.rfind("init", 0) == 0) {
                cfg.bench_inits.push_back(value);
                ++bench_init_count;
            } else {
                throw ConfigError("config: unknown key [bench] " + key);
            }
        } else {
            throw ConfigError("config: unknown section [" + section + "]");
        }
    }
    return cfg;
}

Grid RunConfig::make_grid() const {
    if (model_name == "gl1d") {
        const int n = nx > 0 ? nx : 100;
        const double l = lx > 0.0 ? lx : 1.0;
        return Grid::make_1d(n, l);
    }
    if (model_name == "lb2d") {
        const int n_x = nx > 0 ? nx : 64;
        const int n_y = ny > 0 ? ny : 64;
        const double l_x = lx > 0.0 ? lx : 16.0 * M_PI / std::sqrt(3.0);
        const double l_y = ly > 0.0 ? ly : 8.0 * M_PI;
        return Grid::make_2d(n_x, n_y, l_x, l_y);
    }
    throw ConfigError("config: unknown model name '" + model_name + "'");
}

std::shared_ptr<OperatorBackend> RunConfig::make_backend(const Grid& g) const {
    std::string kind = backend;
    if (kind.empty()) kind = model_name == "gl1d" ? "fd" : "spectral";
    if (kind == "fd")
        return std::make_shared<OperatorBackend>(g, BackendKind::FiniteDifference);
    if (kind == "spectral")
        return std::make_shared<OperatorBackend>(g, BackendKind::Spectral);
    throw ConfigError("config: unknown backend '" + kind + "'");
}

std::unique_ptr<EnergyModel> RunConfig::make_model() const {
    Grid g = make_grid();
    auto be = make_backend(g);
    if (model_name == "gl1d") return std::make_unique<GinzburgLandau>(be, gl);
    return std::make_unique<LandauBrazovskii>(be, lb);
}

Field RunConfig::initial_from_expression(const std::string& expr,
                                         const EnergyModel& model) const {
    Field phi0 = evaluate_expression(expr, model.grid());
    if (std::abs(mean(phi0) - model.mass()) > 1e-12)
        throw ConfigError("config: |mean(phi0) - mass| > 1e-12 for init '" + expr + "'");
    return phi0;
}

Field RunConfig::make_initial_field(const EnergyModel& model) const {
    if (!phi_file.empty()) {
        Field phi0 = read_field(phi_file);
        if (phi0.grid != model.grid())
            throw ConfigError("config: field file grid does not match model grid: " + phi_file);
        if (std::abs(mean(phi0) - model.mass()) > 1e-12)
            throw ConfigError("config: |mean(phi0) - mass| > 1e-12 in " + phi_file);
        return phi0;
    }
    std::string expr = phi_expr;
    if (expr.empty()) {
        // shipped defaults; documented as artifact-chosen, not experiment-mandated
        expr = model_name == "gl1d" ? "0.6 + 0.2*cos(2*pi*x)" : "0";
    }
    return initial_from_expression(expr, model);
}

}  // namespace saddle
