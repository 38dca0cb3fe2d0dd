#include "subdiff/fractional_pde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "subdiff/special_math.hpp"

namespace subdiff {

namespace {

// Thomas elimination for the tridiagonal system; diag/rhs are overwritten.
void solve_tridiagonal(std::vector<double>& sub, std::vector<double>& diag,
                       std::vector<double>& sup, std::vector<double>& rhs,
                       std::vector<double>& out) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        out[i] = (rhs[i] - sup[i] * out[i + 1]) / diag[i];
    }
}

struct DiscreteProblem {
    std::vector<double> coords;
    std::vector<double> a;  // second-derivative coefficient per node
    std::vector<double> b;  // first-derivative coefficient per node
    double c = 0.0;         // zeroth-order coefficient
    std::vector<double> initial;
};

using BoundaryFn = std::function<double(double)>;

// D_t^alpha u = a u'' + b u' + c u marched with the L1 memory sum; the
// spatial operator is applied to (1-theta) u^n + theta u^{n-1}. Returns the
// dense time x space value table.
std::vector<double> march_l1(const DiscreteProblem& problem, double T,
                             int levels, double theta, double alpha,
                             const BoundaryFn& bc_low, const BoundaryFn& bc_high) {
    const int m = static_cast<int>(problem.coords.size());
    const double dt = T / static_cast<double>(levels - 1);
    const double dx = problem.coords[1] - problem.coords[0];

    const auto weights = l1_weights(alpha, levels);
    const double sigma_c = std::pow(dt, -alpha) / gamma_fn(2.0 - alpha);

    std::vector<double> values(static_cast<std::size_t>(levels) *
                               static_cast<std::size_t>(m));
    auto row = [&](int n) { return values.data() + static_cast<std::size_t>(n) * m; };
    std::copy(problem.initial.begin(), problem.initial.end(), row(0));
    row(0)[0] = bc_low(0.0);
    row(0)[m - 1] = bc_high(0.0);

    // Stencil coefficients of L at interior node i.
    const int interior = m - 2;
    std::vector<double> lo(interior), mid(interior), hi(interior);
    for (int i = 0; i < interior; ++i) {
        const double ai = problem.a[static_cast<std::size_t>(i) + 1];
        const double bi = problem.b[static_cast<std::size_t>(i) + 1];
        lo[i] = ai / (dx * dx) - bi / (2.0 * dx);
        mid[i] = -2.0 * ai / (dx * dx) + problem.c;
        hi[i] = ai / (dx * dx) + bi / (2.0 * dx);
    }

    std::vector<double> sub(interior), diag(interior), sup(interior), rhs(interior),
        solved(interior), history(interior);

    for (int n = 1; n < levels; ++n) {
        const double t_n = n * dt;
        const double low = bc_low(t_n);
        const double high = bc_high(t_n);

        // Memory term sum_{j=1}^{n-1} b_j (u^{n-j} - u^{n-j-1}).
        std::fill(history.begin(), history.end(), 0.0);
        for (int j = 1; j < n; ++j) {
            const double w = weights[static_cast<std::size_t>(j)];
            if (w == 0.0) continue;
            const double* newer = row(n - j);
            const double* older = row(n - j - 1);
            for (int i = 0; i < interior; ++i) {
                history[static_cast<std::size_t>(i)] += w * (newer[i + 1] - older[i + 1]);
            }
        }

        const double* prev = row(n - 1);
        for (int i = 0; i < interior; ++i) {
            const double lu_prev =
                lo[i] * prev[i] + mid[i] * prev[i + 1] + hi[i] * prev[i + 2];
            rhs[static_cast<std::size_t>(i)] =
                sigma_c * (prev[i + 1] - history[static_cast<std::size_t>(i)]) +
                theta * lu_prev;
        }

        double* cur = row(n);
        cur[0] = low;
        cur[m - 1] = high;
        if (theta == 1.0) {
            for (int i = 0; i < interior; ++i) {
                cur[i + 1] = rhs[static_cast<std::size_t>(i)] / sigma_c;
            }
        } else {
            const double w = 1.0 - theta;
            for (int i = 0; i < interior; ++i) {
                sub[static_cast<std::size_t>(i)] = -w * lo[i];
                diag[static_cast<std::size_t>(i)] = sigma_c - w * mid[i];
                sup[static_cast<std::size_t>(i)] = -w * hi[i];
            }
            rhs[0] += w * lo[0] * low;
            rhs[static_cast<std::size_t>(interior) - 1] += w * hi[interior - 1] * high;
            solve_tridiagonal(sub, diag, sup, rhs, solved);
            for (int i = 0; i < interior; ++i) cur[i + 1] = solved[static_cast<std::size_t>(i)];
        }

        // Runaway slices flag an unstable (explicit-regime) configuration.
        const double cap = 10.0 * std::max(std::abs(high), 1.0);
        for (int i = 0; i < m; ++i) {
            if (!(std::abs(cur[i]) <= cap)) {
                throw std::runtime_error(
                    "fractional PDE solve unstable: slice " + std::to_string(n) +
                    " exceeds 10x the far-boundary value (theta=" +
                    std::to_string(theta) + ")");
            }
        }
    }
    return values;
}

// Solves on the requested mesh and on its 2x spatial refinement, then
// combines 4/3 fine - 1/3 coarse at the coarse nodes. The central stencil
// is second order; the combination cancels its leading smooth error term,
// which the published grids need. Boundary columns stay exact.
PdeSolution solve_extrapolated(
    const MarketParams& mp, FractionalOrder order, const PdeGrid& grid,
    const std::function<DiscreteProblem(int)>& build, const BoundaryFn& bc_low,
    const BoundaryFn& bc_high) {
    const int m = grid.space_nodes;
    const int levels = grid.time_nodes;

    const auto coarse_problem = build(m);
    auto values = march_l1(coarse_problem, mp.horizon, levels, grid.theta,
                           order.alpha, bc_low, bc_high);

    if (grid.extrapolate) {
        const int fine_m = 2 * (m - 1) + 1;
        const auto fine = march_l1(build(fine_m), mp.horizon, levels, grid.theta,
                                   order.alpha, bc_low, bc_high);
        for (int n = 0; n < levels; ++n) {
            for (int i = 0; i < m; ++i) {
                const double f = fine[static_cast<std::size_t>(n) * fine_m +
                                      2 * static_cast<std::size_t>(i)];
                double& c = values[static_cast<std::size_t>(n) * m + i];
                c = (4.0 * f - c) / 3.0;
            }
        }
    }

    std::vector<double> times(static_cast<std::size_t>(levels));
    const double dt = mp.horizon / static_cast<double>(levels - 1);
    for (int n = 0; n < levels; ++n) times[static_cast<std::size_t>(n)] = n * dt;
    return PdeSolution(grid, std::move(times), coarse_problem.coords,
                       std::move(values));
}

std::vector<double> uniform_coords(double lo, double hi, int m) {
    std::vector<double> coords(static_cast<std::size_t>(m));
    const double dx = (hi - lo) / static_cast<double>(m - 1);
    for (int i = 0; i < m; ++i) coords[static_cast<std::size_t>(i)] = lo + i * dx;
    coords.back() = hi;
    return coords;
}

}  // namespace

void PdeGrid::validate() const {
    if (!(x_min < x_max)) throw std::invalid_argument("PdeGrid: x_min must be < x_max");
    if (space_nodes < 3) throw std::invalid_argument("PdeGrid: need >= 3 space nodes");
    if (time_nodes < 2) throw std::invalid_argument("PdeGrid: need >= 2 time nodes");
    if (!(theta >= 0.0) || !(theta <= 1.0)) {
        throw std::invalid_argument("PdeGrid: theta must lie in [0,1]");
    }
}

void FractionalOrder::validate() const {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::invalid_argument("FractionalOrder: alpha must lie in (0,1]");
    }
}

std::vector<double> l1_weights(double alpha, int count) {
    if (count < 1) throw std::invalid_argument("l1_weights: count must be >= 1");
    const double e = 1.0 - alpha;
    std::vector<double> w(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        const double lead = std::pow(static_cast<double>(j + 1), e);
        const double tail = j == 0 ? 0.0 : std::pow(static_cast<double>(j), e);
        w[static_cast<std::size_t>(j)] = lead - tail;
    }
    // Sanity: nonnegative, nonincreasing, telescoping to count^(1-alpha).
    double sum = 0.0;
    for (int j = 0; j < count; ++j) {
        const double wj = w[static_cast<std::size_t>(j)];
        if (wj < 0.0 || (j > 0 && wj > w[static_cast<std::size_t>(j) - 1] + 1e-15)) {
            throw std::logic_error("l1_weights: weight sequence is not admissible");
        }
        sum += wj;
    }
    if (std::abs(sum - std::pow(static_cast<double>(count), e)) >
        1e-9 * std::max(1.0, sum)) {
        throw std::logic_error("l1_weights: telescoping sum check failed");
    }
    return w;
}

PdeSolution::PdeSolution(PdeGrid grid, std::vector<double> times,
                         std::vector<double> coords, std::vector<double> values)
    : grid_(grid),
      times_(std::move(times)),
      coords_(std::move(coords)),
      values_(std::move(values)) {}

double PdeSolution::at(int time_index, int space_index) const {
    return values_[static_cast<std::size_t>(time_index) * coords_.size() +
                   static_cast<std::size_t>(space_index)];
}

double PdeSolution::interpolate(double z, double t) const {
    const double x =
        grid_.coordinate == PdeCoordinate::LogPrice ? std::log(z) : z;
    const double T = times_.back();
    if (!(x >= grid_.x_min - 1e-12) || !(x <= grid_.x_max + 1e-12)) {
        throw std::domain_error("PdeSolution::interpolate: price outside the grid");
    }
    if (!(t >= -1e-12) || !(t <= T * (1.0 + 1e-12))) {
        throw std::domain_error("PdeSolution::interpolate: time outside [0, T]");
    }

    const int m = static_cast<int>(coords_.size());
    const int levels = static_cast<int>(times_.size());
    const double dt = T / static_cast<double>(levels - 1);
    const double dx = (grid_.x_max - grid_.x_min) / static_cast<double>(m - 1);

    const double s = std::clamp(t / dt, 0.0, static_cast<double>(levels - 1));
    const int n0 = std::min(static_cast<int>(s), levels - 2);
    const double wt = s - n0;

    const double p = std::clamp((x - grid_.x_min) / dx, 0.0, static_cast<double>(m - 1));
    if (m < 4) {
        const int i0 = std::min(static_cast<int>(p), m - 2);
        const double frac = p - i0;
        auto linear = [&](int n) {
            return (1.0 - frac) * at(n, i0) + frac * at(n, i0 + 1);
        };
        const double lower = linear(n0);
        return wt == 0.0 ? lower : (1.0 - wt) * lower + wt * linear(n0 + 1);
    }

    // Four-point Lagrange stencil in space, clamped at the edges.
    int base = static_cast<int>(p) - 1;
    base = std::clamp(base, 0, m - 4);

    auto lagrange4 = [&](int n) {
        double result = 0.0;
        for (int k = 0; k < 4; ++k) {
            double basis = 1.0;
            for (int l = 0; l < 4; ++l) {
                if (l == k) continue;
                basis *= (p - (base + l)) / static_cast<double>(k - l);
            }
            result += basis * at(n, base + k);
        }
        return result;
    };

    const double lower = lagrange4(n0);
    if (wt == 0.0) return lower;
    return (1.0 - wt) * lower + wt * lagrange4(n0 + 1);
}

double PdeSolution::value_at_expiry(double z) const {
    return interpolate(z, times_.back());
}

PdeSolution solve_frac_bs_call(const MarketParams& mp, FractionalOrder order,
                               const PdeGrid& grid) {
    mp.validate();
    order.validate();
    grid.validate();
    if (!(mp.horizon > 0.0)) {
        throw std::invalid_argument("solve_frac_bs_call: horizon must be positive");
    }
    if (!(mp.strike > 0.0)) {
        throw std::invalid_argument("solve_frac_bs_call: strike must be positive");
    }

    const bool log_coord = grid.coordinate == PdeCoordinate::LogPrice;
    const double strike_coord = log_coord ? std::log(mp.strike) : mp.strike;
    if (!(strike_coord > grid.x_min) || !(strike_coord < grid.x_max)) {
        throw std::invalid_argument("solve_frac_bs_call: grid does not cover the strike");
    }

    auto build = [&](int m) {
        DiscreteProblem problem;
        problem.coords = uniform_coords(grid.x_min, grid.x_max, m);
        problem.a.resize(static_cast<std::size_t>(m));
        problem.b.resize(static_cast<std::size_t>(m));
        problem.c = -mp.rate;
        problem.initial.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const double xi = problem.coords[static_cast<std::size_t>(i)];
            if (log_coord) {
                problem.a[static_cast<std::size_t>(i)] = 0.5 * mp.sigma * mp.sigma;
                problem.b[static_cast<std::size_t>(i)] =
                    mp.rate - 0.5 * mp.sigma * mp.sigma;
                problem.initial[static_cast<std::size_t>(i)] =
                    std::max(std::exp(xi) - mp.strike, 0.0);
            } else {
                problem.a[static_cast<std::size_t>(i)] = 0.5 * mp.sigma * mp.sigma * xi * xi;
                problem.b[static_cast<std::size_t>(i)] = mp.rate * xi;
                problem.initial[static_cast<std::size_t>(i)] = std::max(xi - mp.strike, 0.0);
            }
        }
        return problem;
    };

    const double z_max = log_coord ? std::exp(grid.x_max) : grid.x_max;
    const bool classical = order.alpha == 1.0;
    // v ~ z at the far boundary; the classical case keeps the discounted
    // strike correction, the fractional one has no elementary discount.
    BoundaryFn bc_low = [](double) { return 0.0; };
    BoundaryFn bc_high = [=, &mp](double t) {
        return classical ? z_max - mp.strike * std::exp(-mp.rate * t) : z_max;
    };
    return solve_extrapolated(mp, order, grid, build, bc_low, bc_high);
}

PdeSolution solve_frac_bachelier_call(const MarketParams& mp, FractionalOrder order,
                                      const PdeGrid& grid) {
    mp.validate();
    order.validate();
    grid.validate();
    if (grid.coordinate != PdeCoordinate::Price) {
        throw UnsupportedRegime(
            "solve_frac_bachelier_call: constant-diffusion operator is posed in "
            "the raw price coordinate");
    }
    if (!(mp.horizon > 0.0)) {
        throw std::invalid_argument("solve_frac_bachelier_call: horizon must be positive");
    }
    if (!(mp.strike > grid.x_min) || !(mp.strike < grid.x_max)) {
        throw std::invalid_argument(
            "solve_frac_bachelier_call: grid does not cover the strike");
    }

    auto build = [&](int m) {
        DiscreteProblem problem;
        problem.coords = uniform_coords(grid.x_min, grid.x_max, m);
        problem.a.assign(static_cast<std::size_t>(m), 0.5 * mp.sigma_ba * mp.sigma_ba);
        problem.b.resize(static_cast<std::size_t>(m));
        problem.c = -mp.rate;
        problem.initial.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const double zi = problem.coords[static_cast<std::size_t>(i)];
            problem.b[static_cast<std::size_t>(i)] = mp.rate * zi;
            problem.initial[static_cast<std::size_t>(i)] = std::max(zi - mp.strike, 0.0);
        }
        return problem;
    };

    const double z_max = grid.x_max;
    const bool classical = order.alpha == 1.0;
    BoundaryFn bc_low = [](double) { return 0.0; };
    BoundaryFn bc_high = [=, &mp](double t) {
        return classical ? z_max - mp.strike * std::exp(-mp.rate * t) : z_max;
    };
    return solve_extrapolated(mp, order, grid, build, bc_low, bc_high);
}

void write_pde_csv(const PdeSolution& solution, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file + " for writing");
    out << "t,z,value\n";
    out.precision(17);
    const bool log_coord = solution.grid().coordinate == PdeCoordinate::LogPrice;
    for (std::size_t n = 0; n < solution.times().size(); ++n) {
        for (std::size_t i = 0; i < solution.coords().size(); ++i) {
            const double coord = solution.coords()[i];
            const double z = log_coord ? std::exp(coord) : coord;
            out << solution.times()[n] << ',' << z << ','
                << solution.at(static_cast<int>(n), static_cast<int>(i)) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for " + file);
}

}  // namespace subdiff
