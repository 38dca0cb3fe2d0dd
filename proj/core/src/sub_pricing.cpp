#include "subdiff/sub_pricing.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "subdiff/parallel.hpp"
#include "subdiff/special_math.hpp"

namespace subdiff {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Mean and standard error anchored at the first sample, so that a
// degenerate sample (all values equal) reports exactly zero error.
PriceEstimate summarize(const std::vector<double>& values, Clock::time_point start) {
    const auto n = static_cast<std::int64_t>(values.size());
    if (n < 2) throw std::invalid_argument("standard error needs at least 2 samples");

    const double anchor = values.front();
    double shifted_sum = 0.0;
    for (double v : values) shifted_sum += v - anchor;
    const double mean = anchor + shifted_sum / static_cast<double>(n);

    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);

    PriceEstimate est;
    est.value = mean;
    est.std_error = std::sqrt(var / static_cast<double>(n));
    est.samples = n;
    est.elapsed_ms = elapsed_ms_since(start);
    return est;
}

double resolve_delta(const LaplaceExponentSpec& spec, double T, const MCConfig& mc) {
    if (mc.delta > 0.0) return mc.delta;
    return default_inverse_step(spec, T);
}

}  // namespace

void MCConfig::validate() const {
    if (samples < 2) throw std::invalid_argument("MCConfig: samples must be >= 2");
    if (delta < 0.0) throw std::invalid_argument("MCConfig: delta must be positive (or 0 for the default step)");
}

HorizonSampleSet draw_horizons(const LaplaceExponentSpec& spec, double T,
                               const MCConfig& mc) {
    mc.validate();
    if (!(T > 0.0)) throw std::domain_error("draw_horizons: T must be positive");
    if (mc.antithetic) {
        throw std::invalid_argument(
            "draw_horizons: antithetic pairing is only available in the path "
            "simulator; horizon draws have no symmetric variate");
    }

    HorizonSampleSet hs;
    hs.spec = spec;
    hs.horizon = T;
    hs.draws.resize(static_cast<std::size_t>(mc.samples));

    if (spec.family() == SubordinatorFamily::Identity) {
        for (auto& d : hs.draws) d = T;
        return hs;
    }

    const double delta = resolve_delta(spec, T, mc);
    parallel_for(mc.samples, [&](std::int64_t i) {
        hs.draws[static_cast<std::size_t>(i)] = sample_inverse_at(
            spec, T, delta, RngStream{mc.seed, static_cast<std::uint64_t>(i)});
    });
    return hs;
}

PriceEstimate price_subordinated(const HorizonSampleSet& hs,
                                 const std::function<double(double)>& pricer) {
    const auto start = Clock::now();
    const auto n = static_cast<std::int64_t>(hs.draws.size());
    if (n < 2) throw std::invalid_argument("price_subordinated: needs >= 2 draws");

    std::vector<double> values(hs.draws.size());
    std::mutex failure_mutex;
    std::exception_ptr failure;
    std::int64_t failed_index = -1;
    parallel_for(n, [&](std::int64_t i) {
        try {
            values[static_cast<std::size_t>(i)] =
                pricer(hs.draws[static_cast<std::size_t>(i)]);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (failed_index < 0) {
                failed_index = i;
                failure = std::current_exception();
            }
        }
    });
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw std::runtime_error("price_subordinated: pricer failed at draw " +
                                     std::to_string(failed_index) + ": " + e.what());
        }
    }
    return summarize(values, start);
}

PriceEstimate discount_factor_subordinated(const HorizonSampleSet& hs, double r) {
    return price_subordinated(hs, [r](double tau) { return std::exp(-r * tau); });
}

double parity_residual(const HorizonSampleSet& hs, const MarketParams& mp) {
    const auto put = price_subordinated(hs, [&](double tau) { return bs_put(mp, tau); });
    const auto call = price_subordinated(hs, [&](double tau) { return bs_call(mp, tau); });
    const auto disc = discount_factor_subordinated(hs, mp.rate);
    return put.value - call.value - mp.strike * disc.value + mp.z0;
}

GapBoundResult bachelier_gap_and_bound(const HorizonSampleSet& hs,
                                       const MarketParams& mp) {
    const double scale = std::max(1.0, mp.z0);
    if (std::abs(mp.z0 - mp.strike) > 1e-12 * scale || mp.rate != 0.0 ||
        std::abs(mp.sigma_ba - mp.sigma * mp.z0) > 1e-12 * scale) {
        throw UnsupportedRegime(
            "bachelier_gap_and_bound needs Z0 = K, r = 0 and sigma_ba = sigma * Z0");
    }

    GapBoundResult result;
    result.gap = price_subordinated(hs, [&](double tau) {
        return bachelier_call(mp, tau) - bs_call(mp, tau);
    });

    const double coef =
        mp.z0 * std::pow(mp.sigma, 3) / (12.0 * std::sqrt(2.0 * std::numbers::pi));
    if (hs.spec.family() == SubordinatorFamily::TemperedStable) {
        const auto moment = price_subordinated(
            hs, [](double tau) { return std::pow(tau, 1.5); });
        result.bound = moment.value * coef;
    } else {
        result.bound = inverse_moment(hs.spec.alpha(), 1.5, hs.horizon) * coef;
    }
    return result;
}

PriceEstimate price_subordinated_crr(const HorizonSampleSet& hs,
                                     const MarketParams& mp,
                                     const OptionSpec& opt,
                                     const TreeConfig& tc) {
    if (opt.kind() == OptionKind::LookbackFloatCall) {
        throw UnsupportedRegime(
            "price_subordinated_crr: lookback payoff has no linear growth "
            "bound; binomial pricing is not offered for it");
    }
    return price_subordinated(
        hs, [&](double tau) { return crr_price(mp, opt, tc, tau); });
}

PriceEstimate price_subordinated_crr(const LaplaceExponentSpec& spec,
                                     const MarketParams& mp,
                                     const OptionSpec& opt,
                                     const TreeConfig& tc, const MCConfig& mc) {
    const auto start = Clock::now();
    const auto hs = draw_horizons(spec, mp.horizon, mc);
    auto est = price_subordinated_crr(hs, mp, opt, tc);
    est.elapsed_ms = elapsed_ms_since(start);
    return est;
}

PriceEstimate price_lookback_subordinated_closed(const LaplaceExponentSpec& spec,
                                                 const MarketParams& mp,
                                                 const MCConfig& mc) {
    if (!(mp.rate > 0.0)) {
        throw std::domain_error("price_lookback_subordinated_closed requires rate > 0");
    }
    const auto start = Clock::now();
    const auto hs = draw_horizons(spec, mp.horizon, mc);
    auto est = price_subordinated(
        hs, [&](double tau) { return lookback_call_closed(mp, tau); });
    est.elapsed_ms = elapsed_ms_since(start);
    return est;
}

PriceEstimate price_lookback_path_mc(const LaplaceExponentSpec& spec,
                                     const MarketParams& mp,
                                     int path_grid_size, const MCConfig& mc) {
    mc.validate();
    mp.validate();
    if (path_grid_size < 2) {
        throw std::invalid_argument("price_lookback_path_mc: grid needs >= 2 points");
    }
    const double T = mp.horizon;
    if (!(T > 0.0)) throw std::domain_error("price_lookback_path_mc: horizon must be positive");
    if (mc.antithetic && (mc.samples % 2 != 0 || mc.samples < 4)) {
        throw std::invalid_argument(
            "price_lookback_path_mc: antithetic pairing needs an even sample "
            "count of at least 4");
    }

    const auto start = Clock::now();
    std::vector<double> grid(static_cast<std::size_t>(path_grid_size));
    for (int j = 0; j < path_grid_size; ++j) {
        grid[static_cast<std::size_t>(j)] =
            T * static_cast<double>(j) / static_cast<double>(path_grid_size - 1);
    }

    const double delta = spec.family() == SubordinatorFamily::Identity
                             ? 0.0
                             : resolve_delta(spec, T, mc);
    const double drift = mp.rate - 0.5 * mp.sigma * mp.sigma;

    // One path: clock stream 2i, Brownian stream 2i+1. With antithetic
    // pairing the reflected path reuses both streams.
    struct PathPayoffs {
        double plus = 0.0;
        double minus = 0.0;
    };
    auto simulate = [&](std::int64_t i, bool both) {
        const InversePath clock =
            sample_inverse_path(spec, grid, delta,
                                RngStream{mc.seed, 2 * static_cast<std::uint64_t>(i)});
        auto noise = RngStream{mc.seed, 2 * static_cast<std::uint64_t>(i) + 1}.make_engine();

        double x_plus = 0.0, x_minus = 0.0;
        double min_plus = 0.0, min_minus = 0.0;  // running min of x(t), x(0) = 0
        double prev_s = clock.values.front();
        for (std::size_t j = 1; j < clock.values.size(); ++j) {
            const double ds = clock.values[j] - prev_s;
            prev_s = clock.values[j];
            const double dB = ds > 0.0 ? std::sqrt(ds) * standard_normal(noise) : 0.0;
            x_plus += drift * ds + mp.sigma * dB;
            min_plus = std::min(min_plus, x_plus);
            if (both) {
                x_minus += drift * ds - mp.sigma * dB;
                min_minus = std::min(min_minus, x_minus);
            }
        }
        const double s_T = clock.values.back();
        PathPayoffs out;
        out.plus = std::exp(-mp.rate * s_T) * mp.z0 *
                   (std::exp(x_plus) - std::exp(min_plus));
        if (both) {
            out.minus = std::exp(-mp.rate * s_T) * mp.z0 *
                        (std::exp(x_minus) - std::exp(min_minus));
        }
        return out;
    };

    if (mc.antithetic) {
        const std::int64_t pairs = mc.samples / 2;
        std::vector<double> pair_means(static_cast<std::size_t>(pairs));
        parallel_for(pairs, [&](std::int64_t i) {
            const auto p = simulate(i, true);
            pair_means[static_cast<std::size_t>(i)] = 0.5 * (p.plus + p.minus);
        });
        auto est = summarize(pair_means, start);
        est.samples = mc.samples;
        return est;
    }

    std::vector<double> payoffs(static_cast<std::size_t>(mc.samples));
    parallel_for(mc.samples, [&](std::int64_t i) {
        payoffs[static_cast<std::size_t>(i)] = simulate(i, false).plus;
    });
    return summarize(payoffs, start);
}

std::string to_json(const ResultRecord& record) {
    nlohmann::json j;
    j["method"] = record.method;
    j["alpha"] = record.alpha;
    j["lambda"] = record.lambda;
    j["params"] = {
        {"z0", record.params.z0},       {"strike", record.params.strike},
        {"rate", record.params.rate},   {"sigma", record.params.sigma},
        {"sigma_ba", record.params.sigma_ba}, {"horizon", record.params.horizon},
    };
    for (const auto& [key, value] : record.extras) j["params"][key] = value;
    j["value"] = record.estimate.value;
    j["std_error"] = record.estimate.std_error;
    j["samples"] = record.estimate.samples;
    j["elapsed_ms"] = record.estimate.elapsed_ms;
    return j.dump();
}

}  // namespace subdiff
