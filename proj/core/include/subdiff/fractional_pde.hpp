#pragma once

#include <string>
#include <vector>

#include "subdiff/classical_pricing.hpp"

namespace subdiff {

enum class PdeCoordinate { LogPrice, Price };

/// Space-time mesh and scheme weighting. theta blends the spatial operator
/// between the new level (theta = 0, fully implicit) and the previous one
/// (theta = 1, explicit). space_nodes and time_nodes count grid nodes
/// including both boundaries / the initial level. With `extrapolate` set
/// the solver also runs a doubled spatial mesh and combines the two passes,
/// cancelling the leading central-difference error term.
struct PdeGrid {
    double x_min = -20.0;
    double x_max = 10.0;
    int space_nodes = 80;
    int time_nodes = 120;
    double theta = 0.0;
    PdeCoordinate coordinate = PdeCoordinate::LogPrice;
    bool extrapolate = true;

    void validate() const;
};

/// Caputo order of the time derivative; alpha = 1 degrades the memory
/// operator to the plain backward difference.
struct FractionalOrder {
    double alpha = 1.0;

    void validate() const;
};

/// Dense solution of a fractional pricing equation. Row n holds the slice
/// at time-to-expiry t_n; interpolation accepts the price coordinate z.
class PdeSolution {
  public:
    PdeSolution(PdeGrid grid, std::vector<double> times, std::vector<double> coords,
                std::vector<double> values);

    [[nodiscard]] const PdeGrid& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] const std::vector<double>& coords() const { return coords_; }
    [[nodiscard]] double at(int time_index, int space_index) const;

    /// Value at price z and time-to-expiry t (cubic in space, linear in t).
    [[nodiscard]] double interpolate(double z, double t) const;

    /// Terminal slice shortcut: the price today for spot z.
    [[nodiscard]] double value_at_expiry(double z) const;

  private:
    PdeGrid grid_;
    std::vector<double> times_;
    std::vector<double> coords_;  // log-price or price, per grid_.coordinate
    std::vector<double> values_;  // row-major, time x space
};

/// Fractional Black-Scholes call: D_t^alpha v = sigma^2 z^2 v_zz / 2
/// + r z v_z - r v with payoff initial data and v(0,t) = 0. Solved in the
/// coordinate selected by the grid.
PdeSolution solve_frac_bs_call(const MarketParams& mp, FractionalOrder alpha,
                               const PdeGrid& grid);

/// Fractional Bachelier call: D_t^alpha w = sigma_ba^2 w_zz / 2
/// + r z w_z - r w. Price coordinate only.
PdeSolution solve_frac_bachelier_call(const MarketParams& mp, FractionalOrder alpha,
                                      const PdeGrid& grid);

/// L1 weights b_j = (j+1)^(1-alpha) - j^(1-alpha), j = 0..count-1.
std::vector<double> l1_weights(double alpha, int count);

/// Writes "t,z,value" rows for every node of the solution.
void write_pde_csv(const PdeSolution& solution, const std::string& file);

}  // namespace subdiff
