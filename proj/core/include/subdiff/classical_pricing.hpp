#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace subdiff {

/// Raised when a pricer is asked for a regime it does not cover (for
/// example the Bachelier pricer with a nonzero rate).
struct UnsupportedRegime : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when the binomial-tree risk-neutral probability leaves [0,1].
struct TreeCalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Market data shared by every pricer. sigma is the lognormal volatility,
/// sigma_ba the arithmetic (Bachelier) volatility.
struct MarketParams {
    double z0 = 1.0;
    double strike = 1.0;
    double rate = 0.0;
    double sigma = 0.2;
    double sigma_ba = 0.2;
    double horizon = 1.0;

    void validate() const;
};

enum class OptionKind {
    EuroCall,
    EuroPut,
    AmericanPut,
    LookbackFloatCall,
    CustomEuropean,
};

/// Payoff identity. Custom European payoffs must satisfy the linear growth
/// bound f(x) <= c|x|; the factory spot-checks it over a log-spaced grid.
class OptionSpec {
  public:
    static OptionSpec euro_call() { return OptionSpec(OptionKind::EuroCall); }
    static OptionSpec euro_put() { return OptionSpec(OptionKind::EuroPut); }
    static OptionSpec american_put() { return OptionSpec(OptionKind::AmericanPut); }
    static OptionSpec lookback_float_call() {
        return OptionSpec(OptionKind::LookbackFloatCall);
    }
    static OptionSpec custom_european(std::function<double(double)> payoff,
                                      double growth_bound_c);

    [[nodiscard]] OptionKind kind() const { return kind_; }
    [[nodiscard]] double growth_bound() const { return growth_bound_c_; }

    /// Terminal payoff at spot x (European kinds and the American put's
    /// exercise value). Not defined for the path-dependent lookback.
    [[nodiscard]] double payoff(double x, double strike) const;

    [[nodiscard]] std::string name() const;

  private:
    explicit OptionSpec(OptionKind kind) : kind_(kind) {}

    OptionKind kind_;
    std::function<double(double)> custom_payoff_;
    double growth_bound_c_ = 0.0;
};

/// Binomial-tree resolution.
struct TreeConfig {
    int steps = 100;

    void validate() const;
};

/// Black-Scholes European call with expiry tau.
double bs_call(const MarketParams& mp, double tau);

/// Black-Scholes European put (closed form; satisfies put-call parity with
/// bs_call to machine precision).
double bs_put(const MarketParams& mp, double tau);

/// Bachelier (arithmetic) call for the zero-rate regime. Throws
/// UnsupportedRegime when mp.rate != 0.
double bachelier_call(const MarketParams& mp, double tau);

/// Cox-Ross-Rubinstein price with tc.steps levels over [0, tau]. Supports
/// European calls/puts, the American put, and custom European payoffs.
double crr_price(const MarketParams& mp, const OptionSpec& opt,
                 const TreeConfig& tc, double tau);

/// Floating-strike lookback call, closed form; requires rate > 0.
double lookback_call_closed(const MarketParams& mp, double tau);

}  // namespace subdiff
