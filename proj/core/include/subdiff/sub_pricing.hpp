#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/classical_pricing.hpp"
#include "subdiff/subordinator.hpp"

namespace subdiff {

/// Monte Carlo configuration. `delta` is the staircase step of the
/// inverse-subordinator sampler. `antithetic` pairs the Brownian noise in
/// the path simulator; horizon-draw estimators have no symmetric variate
/// and reject it.
struct MCConfig {
    std::int64_t samples = 10'000;
    std::uint64_t seed = 0;
    double delta = 0.0;
    bool antithetic = false;

    void validate() const;
};

/// Point estimate with its Monte Carlo error bar:
/// std_error = sample standard deviation / sqrt(samples).
struct PriceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    double elapsed_ms = 0.0;
};

/// Horizon draws S^(i)(T) reusable across pricers, which makes per-draw
/// identities (parity, price gaps) hold exactly in the estimates.
struct HorizonSampleSet {
    LaplaceExponentSpec spec = LaplaceExponentSpec::identity();
    double horizon = 0.0;
    std::vector<double> draws;
};

/// Draws mc.samples independent realizations of S(T). Deterministic in
/// (mc.seed); draw i always comes from stream id i regardless of the
/// worker count.
HorizonSampleSet draw_horizons(const LaplaceExponentSpec& spec, double T,
                               const MCConfig& mc);

/// Core estimator: (1/M) sum pricer(S^(i)(T)) with its standard error.
PriceEstimate price_subordinated(const HorizonSampleSet& hs,
                                 const std::function<double(double)>& pricer);

/// Monte Carlo estimate of E exp(-r S(T)) over the shared draws.
PriceEstimate discount_factor_subordinated(const HorizonSampleSet& hs, double r);

/// Put-call parity defect P_S - C_S - K E exp(-r S(T)) + Z0 computed on
/// common draws; zero up to rounding by the per-horizon parity identity.
double parity_residual(const HorizonSampleSet& hs, const MarketParams& mp);

struct GapBoundResult {
    PriceEstimate gap;  ///< estimate of C_S^Ba - C_S on common draws
    double bound = 0.0; ///< E S^{3/2}(T) * Z0 sigma^3 / (12 sqrt(2 pi))
};

/// Gap between the subordinated Bachelier and Black-Scholes call prices
/// together with its upper bound. Requires the at-the-money, zero-rate
/// regime with sigma_ba = sigma * z0; throws UnsupportedRegime otherwise.
/// The bound is closed form for the alpha-stable and identity clocks and a
/// Monte Carlo estimate for the tempered family.
GapBoundResult bachelier_gap_and_bound(const HorizonSampleSet& hs,
                                       const MarketParams& mp);

/// Binomial-tree pricing at random horizons: the tree is recalibrated to
/// each draw tau = S^(i)(T).
PriceEstimate price_subordinated_crr(const LaplaceExponentSpec& spec,
                                     const MarketParams& mp,
                                     const OptionSpec& opt,
                                     const TreeConfig& tc, const MCConfig& mc);
PriceEstimate price_subordinated_crr(const HorizonSampleSet& hs,
                                     const MarketParams& mp,
                                     const OptionSpec& opt,
                                     const TreeConfig& tc);

/// Lookback call via the closed form evaluated at random horizons;
/// requires rate > 0.
PriceEstimate price_lookback_subordinated_closed(const LaplaceExponentSpec& spec,
                                                 const MarketParams& mp,
                                                 const MCConfig& mc);

/// Lookback call by full path simulation: subordinated geometric Brownian
/// paths on a uniform grid with risk-neutral drift r - sigma^2/2, running
/// minimum tracked iteratively, payoff discounted by exp(-r S(T)).
PriceEstimate price_lookback_path_mc(const LaplaceExponentSpec& spec,
                                     const MarketParams& mp,
                                     int path_grid_size, const MCConfig& mc);

/// One result row of a pricing run, serializable to JSON.
struct ResultRecord {
    std::string method;
    double alpha = 1.0;
    double lambda = 0.0;
    MarketParams params;
    PriceEstimate estimate;
    std::vector<std::pair<std::string, double>> extras;
};

std::string to_json(const ResultRecord& record);

}  // namespace subdiff
