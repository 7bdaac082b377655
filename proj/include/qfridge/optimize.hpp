// optimize.hpp: scalar maximisation (grid scan, bracket, golden section) and
// power-law exponent fits.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfridge/errors.hpp"

namespace qfridge {

// Raised when the best grid point sits on a boundary or the objective is flat.
class NoInteriorMaximum : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

enum class GridScale { linear, log };

inline std::vector<double> make_grid(double start, double stop, int points, GridScale scale) {
    if (points < 2)
        throw ConfigError("grid needs at least 2 points");
    if (!std::isfinite(start) || !std::isfinite(stop))
        throw ConfigError("grid endpoints must be finite");
    if (scale == GridScale::log && (!(start > 0.0) || !(stop > 0.0)))
        throw ConfigError("log grid requires positive endpoints");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        g[static_cast<std::size_t>(i)] = scale == GridScale::linear
                                             ? start + t * (stop - start)
                                             : std::exp(std::log(start) + t * (std::log(stop) - std::log(start)));
    }
    g.front() = start;
    g.back() = stop;
    return g;
}

struct Maximum {
    double argmax{0.0};
    double value{0.0};
    double bracket_lo{0.0};
    double bracket_hi{0.0};
    double value_lo{0.0};   // objective at the bracket ends
    double value_hi{0.0};
    int evaluations{0};
};

// Golden-section refinement inside [lo, hi] until the bracket is below
// rel_tol * |x|. Work in log(x) when log_scale is set (x > 0).
inline Maximum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                       double rel_tol = 1e-6, bool log_scale = false, int max_iter = 500) {
    if (!(lo < hi))
        throw std::invalid_argument("golden_section_maximize: need lo < hi");
    const auto to_x = [&](double u) { return log_scale ? std::exp(u) : u; };
    double a = log_scale ? std::log(lo) : lo;
    double b = log_scale ? std::log(hi) : hi;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    Maximum m;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(to_x(c));
    double fd = f(to_x(d));
    m.evaluations = 2;
    for (int it = 0; it < max_iter; ++it) {
        const double xa = to_x(a), xb = to_x(b);
        if (xb - xa <= rel_tol * std::max(std::abs(xa), std::abs(xb)) * 0.5)
            break;
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(to_x(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(to_x(d));
        }
        ++m.evaluations;
    }
    m.argmax = fc >= fd ? to_x(c) : to_x(d);
    m.value = std::max(fc, fd);
    m.bracket_lo = lo;
    m.bracket_hi = hi;
    return m;
}

// Scan `grid`, bracket the best point by its neighbours and refine. Throws
// NoInteriorMaximum when the best point is a grid endpoint or the scan is flat.
inline Maximum maximize_on_grid(const std::function<double(double)>& f, const std::vector<double>& grid,
                                double rel_tol = 1e-6, bool log_scale = false) {
    if (grid.size() < 3)
        throw ConfigError("maximisation grid needs at least 3 points");
    std::vector<double> values(grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = f(grid[i]);
        if (values[i] > values[best])
            best = i;
    }
    if (best == 0 || best + 1 == grid.size())
        throw NoInteriorMaximum("no interior maximum: best value at the grid boundary x = " +
                                std::to_string(grid[best]));
    if (!(values[best] > values[best - 1] || values[best] > values[best + 1]))
        throw NoInteriorMaximum("no interior maximum: objective is flat around x = " + std::to_string(grid[best]));
    Maximum m = golden_section_maximize(f, grid[best - 1], grid[best + 1], rel_tol, log_scale);
    m.evaluations += static_cast<int>(grid.size());
    m.value_lo = values[best - 1];
    m.value_hi = values[best + 1];
    if (values[best] > m.value) {
        // Refinement cannot lose the scan optimum.
        m.argmax = grid[best];
        m.value = values[best];
    }
    return m;
}

struct PowerLawFit {
    double alpha{0.0};
    double prefactor{0.0};
    double r_squared{0.0};
    double alpha_stderr{0.0};
    double window_lo{0.0};
    double window_hi{0.0};
    std::size_t points{0};
};

// Least squares of log y against log x.
inline PowerLawFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_exponent: x and y differ in length");
    if (x.size() < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0))
            throw std::invalid_argument("fit_exponent: abscissae must be positive");
        if (!(y[i] > 0.0))
            throw PhysicsError("fit_exponent: nonpositive J_c at T_c = " + std::to_string(x[i]));
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("fit_exponent: abscissae must not all coincide");
    PowerLawFit fit;
    fit.alpha = sxy / sxx;
    fit.prefactor = std::exp(my - fit.alpha * mx);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - my - fit.alpha * (lx[i] - mx);
        sse += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.alpha_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
    fit.window_lo = *std::min_element(x.begin(), x.end());
    fit.window_hi = *std::max_element(x.begin(), x.end());
    fit.points = n;
    return fit;
}

} // namespace qfridge
