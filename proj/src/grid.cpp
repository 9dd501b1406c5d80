#include "saddle/grid.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace saddle {

static void check_axis(int n, double length) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("grid: point count must be >= 4 and even, got " +
                                    std::to_string(n));
    if (!(length > 0.0))
        throw std::invalid_argument("grid: domain length must be > 0");
}

Grid Grid::make_1d(int n, double length) {
    check_axis(n, length);
    Grid g;
    g.ndim = 1;
    g.nx = n;
    g.lx = length;
    g.ny = 1;
    g.ly = 1.0;
    return g;
}

Grid Grid::make_2d(int n_x, int n_y, double length_x, double length_y) {
    check_axis(n_x, length_x);
    check_axis(n_y, length_y);
    Grid g;
    g.ndim = 2;
    g.nx = n_x;
    g.ny = n_y;
    g.lx = length_x;
    g.ly = length_y;
    return g;
}

bool Grid::operator==(const Grid& o) const {
    return ndim == o.ndim && nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
}

Field::Field(const Grid& g, Array v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size())
        throw std::invalid_argument("field: value count does not match grid size");
}

Field constant_field(const Grid& g, double c) {
    return Field(g, Array::Constant(g.size(), c));
}

void require_same_grid(const Field& a, const Field& b) {
    if (a.grid != b.grid) throw std::invalid_argument("fields live on different grids");
}

double integrate(const Field& f) { return f.values.sum() * f.grid.cell_volume(); }

double mean(const Field& f) { return f.values.sum() / f.grid.size(); }

double inner_l2(const Field& f, const Field& g) {
    require_same_grid(f, g);
    return (f.values * g.values).sum() * f.grid.cell_volume();
}

double norm_l2(const Field& f) { return std::sqrt((f.values * f.values).sum() * f.grid.cell_volume()); }

void write_field(const Field& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    const Grid& g = f.grid;
    if (g.ndim == 1)
        std::fprintf(fp, "1 %d %.17e\n", g.nx, g.lx);
    else
        std::fprintf(fp, "2 %d %d %.17e %.17e\n", g.nx, g.ny, g.lx, g.ly);
    for (Eigen::Index i = 0; i < f.values.size(); ++i)
        std::fprintf(fp, "%.17e\n", f.values[i]);
    std::fclose(fp);
}

Field read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field file: " + path);
    std::string line;
    // skip leading comments
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') break;
    }
    std::istringstream hdr(line);
    int ndim = 0;
    if (!(hdr >> ndim) || (ndim != 1 && ndim != 2))
        throw std::runtime_error("malformed field header: " + path);
    Grid g;
    if (ndim == 1) {
        int n;
        double l;
        if (!(hdr >> n >> l)) throw std::runtime_error("malformed field header: " + path);
        g = Grid::make_1d(n, l);
    } else {
        int n_x, n_y;
        double l_x, l_y;
        if (!(hdr >> n_x >> n_y >> l_x >> l_y))
            throw std::runtime_error("malformed field header: " + path);
        g = Grid::make_2d(n_x, n_y, l_x, l_y);
    }
    Array v(g.size());
    Eigen::Index count = 0;
    std::string token;
    while (in >> token) {  // strtod so nan/inf tokens reach the finiteness check
        char* end = nullptr;
        const double val = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0')
            throw std::runtime_error("value count mismatch in " + path);
        if (count >= v.size()) throw std::runtime_error("value count mismatch in " + path);
        v[count++] = val;
    }
    if (count != v.size()) throw std::runtime_error("value count mismatch in " + path);
    Field f(g, std::move(v));
    if (!f.finite()) throw std::runtime_error("non-finite values in " + path);
    return f;
}

}  // namespace saddle
