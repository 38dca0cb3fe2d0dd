#include "subdiff/classical_pricing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "subdiff/special_math.hpp"

namespace subdiff {

void MarketParams::validate() const {
    if (!(z0 > 0.0)) throw std::invalid_argument("MarketParams: z0 must be positive");
    if (strike < 0.0) throw std::invalid_argument("MarketParams: strike must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("MarketParams: sigma must be positive");
    if (!(sigma_ba > 0.0)) throw std::invalid_argument("MarketParams: sigma_ba must be positive");
    if (horizon < 0.0) throw std::invalid_argument("MarketParams: horizon must be >= 0");
}

void TreeConfig::validate() const {
    if (steps < 1) throw std::invalid_argument("TreeConfig: steps must be >= 1");
}

OptionSpec OptionSpec::custom_european(std::function<double(double)> payoff,
                                       double growth_bound_c) {
    if (!payoff) throw std::invalid_argument("custom payoff must be callable");
    if (!(growth_bound_c > 0.0)) {
        throw std::invalid_argument("growth bound c must be positive");
    }
    // Spot-check f(x) <= c|x| on a log-spaced grid; the bound itself is the
    // caller's responsibility beyond these probes.
    for (int e = -3; e <= 6; ++e) {
        const double x = std::pow(10.0, e);
        const double f = payoff(x);
        if (!(f <= growth_bound_c * std::abs(x) * (1.0 + 1e-12))) {
            throw std::invalid_argument(
                "custom payoff violates growth bound f(x) <= c|x| at x=" +
                std::to_string(x));
        }
    }
    OptionSpec spec(OptionKind::CustomEuropean);
    spec.custom_payoff_ = std::move(payoff);
    spec.growth_bound_c_ = growth_bound_c;
    return spec;
}

double OptionSpec::payoff(double x, double strike) const {
    switch (kind_) {
        case OptionKind::EuroCall:
            return std::max(x - strike, 0.0);
        case OptionKind::EuroPut:
        case OptionKind::AmericanPut:
            return std::max(strike - x, 0.0);
        case OptionKind::CustomEuropean:
            return custom_payoff_(x);
        case OptionKind::LookbackFloatCall:
            throw std::logic_error("lookback payoff depends on the whole path");
    }
    return 0.0;
}

std::string OptionSpec::name() const {
    switch (kind_) {
        case OptionKind::EuroCall: return "euro-call";
        case OptionKind::EuroPut: return "euro-put";
        case OptionKind::AmericanPut: return "american-put";
        case OptionKind::LookbackFloatCall: return "lookback-float-call";
        case OptionKind::CustomEuropean: return "custom-european";
    }
    return "unknown";
}

double bs_call(const MarketParams& mp, double tau) {
    if (tau < 0.0) throw std::domain_error("bs_call: tau must be >= 0");
    if (tau == 0.0) return std::max(mp.z0 - mp.strike, 0.0);
    if (mp.strike == 0.0) return mp.z0;

    const double sqrt_tau = std::sqrt(tau);
    const double d1 = (std::log(mp.z0 / mp.strike) +
                       (mp.rate + 0.5 * mp.sigma * mp.sigma) * tau) /
                      (mp.sigma * sqrt_tau);
    const double d2 = d1 - mp.sigma * sqrt_tau;
    return mp.z0 * normal_cdf(d1) -
           mp.strike * std::exp(-mp.rate * tau) * normal_cdf(d2);
}

double bs_put(const MarketParams& mp, double tau) {
    if (tau < 0.0) throw std::domain_error("bs_put: tau must be >= 0");
    if (tau == 0.0) return std::max(mp.strike - mp.z0, 0.0);
    if (mp.strike == 0.0) return 0.0;

    const double sqrt_tau = std::sqrt(tau);
    const double d1 = (std::log(mp.z0 / mp.strike) +
                       (mp.rate + 0.5 * mp.sigma * mp.sigma) * tau) /
                      (mp.sigma * sqrt_tau);
    const double d2 = d1 - mp.sigma * sqrt_tau;
    return mp.strike * std::exp(-mp.rate * tau) * normal_cdf(-d2) -
           mp.z0 * normal_cdf(-d1);
}

double bachelier_call(const MarketParams& mp, double tau) {
    if (mp.rate != 0.0) {
        throw UnsupportedRegime("bachelier_call covers the r = 0 regime only");
    }
    if (tau < 0.0) throw std::domain_error("bachelier_call: tau must be >= 0");
    if (tau == 0.0) return std::max(mp.z0 - mp.strike, 0.0);

    const double s = mp.sigma_ba * std::sqrt(tau);
    const double d = (mp.z0 - mp.strike) / s;
    return (mp.z0 - mp.strike) * normal_cdf(d) + s * normal_pdf(d);
}

double crr_price(const MarketParams& mp, const OptionSpec& opt,
                 const TreeConfig& tc, double tau) {
    tc.validate();
    if (tau < 0.0) throw std::domain_error("crr_price: tau must be >= 0");
    if (opt.kind() == OptionKind::LookbackFloatCall) {
        throw UnsupportedRegime(
            "crr_price: lookback payoff has no linear growth bound; "
            "binomial pricing is not offered for it");
    }
    if (tau == 0.0) return opt.payoff(mp.z0, mp.strike);

    const int n = tc.steps;
    const double dt = tau / n;
    // Per-step growth factor exp(r tau / n): the tree must accrete the full
    // horizon tau so that the n -> infinity limit is the B-S price at tau.
    const double up = std::exp(mp.sigma * std::sqrt(dt));
    const double down = 1.0 / up;
    const double growth = std::exp(mp.rate * dt);
    const double q = (growth - down) / (up - down);
    if (!(q >= 0.0) || !(q <= 1.0)) {
        throw TreeCalibrationError(
            "crr_price: risk-neutral probability " + std::to_string(q) +
            " outside [0,1] (n=" + std::to_string(n) + ", tau=" + std::to_string(tau) + ")");
    }
    const double disc = 1.0 / growth;
    const bool american_put = opt.kind() == OptionKind::AmericanPut;

    // Terminal layer: spot z0 * up^j * down^(n-j) = z0 * up^(2j - n).
    std::vector<double> value(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        double spot = mp.z0 * std::exp((2.0 * j - n) * mp.sigma * std::sqrt(dt));
        value[static_cast<std::size_t>(j)] = opt.payoff(spot, mp.strike);
    }

    for (int level = n - 1; level >= 0; --level) {
        for (int j = 0; j <= level; ++j) {
            double cont = disc * (q * value[static_cast<std::size_t>(j) + 1] +
                                  (1.0 - q) * value[static_cast<std::size_t>(j)]);
            if (american_put) {
                double spot =
                    mp.z0 * std::exp((2.0 * j - level) * mp.sigma * std::sqrt(dt));
                cont = std::max(cont, mp.strike - spot);
            }
            value[static_cast<std::size_t>(j)] = cont;
        }
    }
    return value[0];
}

double lookback_call_closed(const MarketParams& mp, double tau) {
    if (!(mp.rate > 0.0)) {
        throw std::domain_error("lookback_call_closed requires rate > 0");
    }
    if (tau < 0.0) throw std::domain_error("lookback_call_closed: tau must be >= 0");
    if (tau == 0.0) return 0.0;

    const double sqrt_tau = std::sqrt(tau);
    const double a1 = (mp.rate / mp.sigma + mp.sigma / 2.0) * sqrt_tau;
    const double a2 = (mp.rate / mp.sigma - mp.sigma / 2.0) * sqrt_tau;
    const double ratio = mp.sigma * mp.sigma / (2.0 * mp.rate);
    return mp.z0 * (1.0 + ratio) * normal_cdf(a1) -
           mp.z0 * std::exp(-mp.rate * tau) * (1.0 - ratio) * normal_cdf(a2) -
           mp.z0 * ratio;
}

}  // namespace subdiff
