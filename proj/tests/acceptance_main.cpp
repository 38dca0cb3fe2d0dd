// Acceptance suite: every quantitative relation the toolkit promises, one
// pass/fail line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "subdiff/classical_pricing.hpp"
#include "subdiff/experiment.hpp"
#include "subdiff/fractional_pde.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/special_math.hpp"
#include "subdiff/sub_pricing.hpp"
#include "subdiff/subordinator.hpp"

using namespace subdiff;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

MarketParams fig2_market() {
    MarketParams mp;
    mp.z0 = 2.0;
    mp.strike = 2.0;
    mp.rate = 0.04;
    mp.sigma = 1.0;
    mp.sigma_ba = 2.0;
    mp.horizon = 2.0;
    return mp;
}

MarketParams atm_zero_rate_market(double sigma, double T) {
    MarketParams mp;
    mp.z0 = 2.0;
    mp.strike = 2.0;
    mp.rate = 0.0;
    mp.sigma = sigma;
    mp.sigma_ba = sigma * mp.z0;
    mp.horizon = T;
    return mp;
}

MCConfig make_mc(std::int64_t samples, std::uint64_t seed,
                 const LaplaceExponentSpec& spec, double T,
                 double target_steps = 1e4) {
    MCConfig mc;
    mc.samples = samples;
    mc.seed = seed;
    mc.delta = spec.family() == SubordinatorFamily::Identity
                   ? 1.0
                   : default_inverse_step(spec, T, target_steps);
    return mc;
}

// 1. Identity clock reproduces the classical closed form with zero error.
Outcome criterion1() {
    Outcome out;
    const auto mp = fig2_market();
    const auto hs = draw_horizons(LaplaceExponentSpec::identity(), 2.0,
                                  make_mc(3000, 1, LaplaceExponentSpec::identity(), 2.0));
    const auto est = price_subordinated(hs, [&](double t) { return bs_call(mp, t); });
    out.require(std::abs(est.value - 1.07923) <= 1e-4,
                "value " + fmt(est.value) + " != 1.07923 +- 1e-4");
    out.require(est.std_error == 0.0, "std_error " + fmt(est.std_error) + " != 0");
    out.detail = "value=" + fmt(est.value) + " se=" + fmt(est.std_error);
    return out;
}

// 2. First moment of S(1) for three stability indices, 1e5 draws each.
Outcome criterion2() {
    Outcome out;
    const std::int64_t m = 100'000;
    for (double alpha : {0.5, 0.7, 0.9}) {
        const auto spec = LaplaceExponentSpec::alpha_stable(alpha);
        // staircase step targeting ~1500 increments per draw: the bias is at
        // most delta, far below the 3-standard-error band at this sample size
        const auto mc = make_mc(m, 2025, spec, 1.0, 1500.0);
        const auto hs = draw_horizons(spec, 1.0, mc);
        const auto est = price_subordinated(hs, [](double t) { return t; });
        const double expected = 1.0 / gamma_fn(alpha + 1.0);
        const double err = std::abs(est.value - expected);
        out.require(err <= 3.0 * est.std_error,
                    "alpha=" + fmt(alpha) + ": |" + fmt(est.value) + " - " +
                        fmt(expected) + "| > 3se=" + fmt(3.0 * est.std_error));
        out.detail += (out.detail.empty() ? "" : ", ") + std::string("alpha=") +
                      fmt(alpha) + " err=" + fmt(err) + " 3se=" + fmt(3.0 * est.std_error);
    }
    return out;
}

// 3. Bachelier/Black-Scholes gap sandwich over the full grid.
Outcome criterion3() {
    Outcome out;
    int cells = 0;
    for (double alpha : {0.5, 0.7, 0.9, 1.0}) {
        const auto spec = LaplaceExponentSpec::alpha_stable(alpha);
        for (double T : {0.5, 2.0}) {
            const auto hs = draw_horizons(spec, T, make_mc(10'000, 3000 + cells, spec, T));
            for (double sigma : {0.5, 1.0}) {
                const auto mp = atm_zero_rate_market(sigma, T);
                const auto res = bachelier_gap_and_bound(hs, mp);
                const bool ok = res.gap.value >= -3.0 * res.gap.std_error &&
                                res.gap.value <= res.bound + 3.0 * res.gap.std_error;
                out.require(ok, "alpha=" + fmt(alpha) + " T=" + fmt(T) + " sigma=" +
                                    fmt(sigma) + ": gap=" + fmt(res.gap.value) +
                                    " bound=" + fmt(res.bound) +
                                    " se=" + fmt(res.gap.std_error));
                ++cells;
            }
        }
    }
    out.detail = std::to_string(cells) + " cells within [-3se, bound+3se]";
    return out;
}

// 4. Put-call parity on shared draws across (alpha, T, r) cells.
Outcome criterion4() {
    Outcome out;
    double worst = 0.0;
    for (double alpha : {0.7, 1.0}) {
        const auto spec = LaplaceExponentSpec::alpha_stable(alpha);
        for (double T : {1.0, 2.0}) {
            const auto hs = draw_horizons(
                spec, T, make_mc(10'000, 4000 + static_cast<int>(10 * alpha), spec, T, 3000.0));
            for (double r : {0.0, 0.04}) {
                MarketParams mp = fig2_market();
                mp.rate = r;
                mp.horizon = T;
                const double residual = parity_residual(hs, mp);
                worst = std::max(worst, std::abs(residual));
                out.require(std::abs(residual) < 1e-9,
                            "alpha=" + fmt(alpha) + " T=" + fmt(T) + " r=" + fmt(r) +
                                ": |residual|=" + fmt(std::abs(residual)));
            }
        }
    }
    out.detail = "max |residual| = " + fmt(worst);
    return out;
}

// 5. Subordinated binomial converges to the subordinated closed form.
Outcome criterion5() {
    Outcome out;
    const auto mp = fig2_market();
    for (double alpha : {0.7, 1.0}) {
        const auto spec = LaplaceExponentSpec::alpha_stable(alpha);
        const auto hs = draw_horizons(spec, 2.0, make_mc(3000, 50, spec, 2.0));
        const auto closed =
            price_subordinated(hs, [&](double t) { return bs_call(mp, t); });

        std::vector<double> gaps;
        for (int n : {125, 250, 500, 1000}) {
            const auto tree =
                price_subordinated_crr(hs, mp, OptionSpec::euro_call(), TreeConfig{n});
            gaps.push_back(std::abs(tree.value - closed.value));
        }
        out.require(gaps.back() < 5e-3, "alpha=" + fmt(alpha) + ": |crr(1000)-closed|=" +
                                            fmt(gaps.back()) + " >= 5e-3");
        for (std::size_t i = 1; i < gaps.size(); ++i) {
            out.require(gaps[i] < gaps[i - 1],
                        "alpha=" + fmt(alpha) + ": gap ladder not shrinking at step " +
                            std::to_string(i) + " (" + fmt(gaps[i - 1]) + " -> " +
                            fmt(gaps[i]) + ")");
        }
        out.detail += (out.detail.empty() ? "" : "; ") + std::string("alpha=") +
                      fmt(alpha) + " gaps(n=125..1000): " + fmt(gaps[0]) + " " +
                      fmt(gaps[1]) + " " + fmt(gaps[2]) + " " + fmt(gaps[3]);
    }
    return out;
}

// 6. Fractional PDE agrees with the closed form (alpha=1) and with Monte
// Carlo (alpha=0.7) on the published grid.
Outcome criterion6() {
    Outcome out;
    const auto mp = fig2_market();
    const PdeGrid grid{-20.0, 10.0, 80, 120, 0.0, PdeCoordinate::LogPrice};

    const auto classical = solve_frac_bs_call(mp, FractionalOrder{1.0}, grid);
    const double closed = bs_call(mp, 2.0);
    const double rel = std::abs(classical.value_at_expiry(mp.z0) - closed) / closed;
    out.require(rel < 0.01, "alpha=1 relative error " + fmt(rel) + " >= 1%");

    const auto spec = LaplaceExponentSpec::alpha_stable(0.7);
    const auto hs = draw_horizons(spec, 2.0, make_mc(10'000, 60, spec, 2.0));
    const auto mc_est = price_subordinated(hs, [&](double t) { return bs_call(mp, t); });
    const auto frac = solve_frac_bs_call(mp, FractionalOrder{0.7}, grid);
    const double diff = std::abs(frac.value_at_expiry(mp.z0) - mc_est.value);
    const double tol = 3.0 * mc_est.std_error + 0.01 * mc_est.value;
    out.require(diff < tol,
                "alpha=0.7: |pde-mc|=" + fmt(diff) + " >= " + fmt(tol));
    out.detail = "alpha=1 rel err " + fmt(rel) + "; alpha=0.7 |pde-mc| " + fmt(diff) +
                 " (tol " + fmt(tol) + ")";
    return out;
}

// 7. Lookback: closed form, path simulation, and their subordinated match.
Outcome criterion7() {
    Outcome out;
    MarketParams mp = fig2_market();
    mp.horizon = 1.0;

    const double closed = lookback_call_closed(mp, 1.0);
    out.require(std::abs(closed - 1.17816) <= 1e-4,
                "closed form " + fmt(closed) + " != 1.17816 +- 1e-4");

    const auto id = LaplaceExponentSpec::identity();
    const auto path_id = price_lookback_path_mc(id, mp, 1000, make_mc(7000, 70, id, 1.0));
    const double tol_id = 3.0 * path_id.std_error + 0.02 * closed;
    out.require(std::abs(path_id.value - closed) < tol_id,
                "identity path-mc " + fmt(path_id.value) + " vs " + fmt(closed) +
                    " (tol " + fmt(tol_id) + ")");

    const auto spec = LaplaceExponentSpec::alpha_stable(0.7);
    const auto sub_closed =
        price_lookback_subordinated_closed(spec, mp, make_mc(7000, 71, spec, 1.0));
    const auto sub_path =
        price_lookback_path_mc(spec, mp, 1000, make_mc(7000, 72, spec, 1.0));
    const double combined = std::sqrt(sub_closed.std_error * sub_closed.std_error +
                                      sub_path.std_error * sub_path.std_error);
    const double tol = 3.0 * combined + 0.02 * sub_closed.value;
    out.require(std::abs(sub_closed.value - sub_path.value) < tol,
                "alpha=0.7: closed " + fmt(sub_closed.value) + " vs path " +
                    fmt(sub_path.value) + " (tol " + fmt(tol) + ")");
    out.detail = "closed=" + fmt(closed) + ", path(id)=" + fmt(path_id.value) +
                 ", closed(0.7)=" + fmt(sub_closed.value) +
                 ", path(0.7)=" + fmt(sub_path.value);
    return out;
}

// 8. American dominance on shared draws with the deep-in-the-money put.
Outcome criterion8() {
    Outcome out;
    MarketParams mp = fig2_market();
    mp.z0 = 5.0;
    mp.strike = 2.0;
    mp.sigma_ba = 5.0;
    for (double alpha : {0.5, 0.7, 0.9}) {
        const auto spec = LaplaceExponentSpec::alpha_stable(alpha);
        const auto hs = draw_horizons(spec, 2.0,
                                      make_mc(3000, 80 + static_cast<int>(10 * alpha),
                                              spec, 2.0, 3000.0));
        const auto amer =
            price_subordinated_crr(hs, mp, OptionSpec::american_put(), TreeConfig{100});
        const auto euro =
            price_subordinated_crr(hs, mp, OptionSpec::euro_put(), TreeConfig{100});
        out.require(amer.value >= euro.value - 3.0 * euro.std_error,
                    "alpha=" + fmt(alpha) + ": amer " + fmt(amer.value) + " < euro " +
                        fmt(euro.value) + " - 3se");
        out.detail += (out.detail.empty() ? "" : ", ") + std::string("alpha=") +
                      fmt(alpha) + " amer=" + fmt(amer.value) + " euro=" + fmt(euro.value);
    }
    return out;
}

// 9. Fuzzed path invariants and bit-identical reruns.
Outcome criterion9() {
    Outcome out;
    const int configs = 10'000;
    std::vector<int> failures(static_cast<std::size_t>(configs), 0);

    parallel_for(configs, [&](std::int64_t i) {
        auto eng = RngStream{9000, static_cast<std::uint64_t>(i)}.make_engine();
        const double alpha = 0.2 + 0.8 * uniform01(eng);
        const double lambda = 2.0 * uniform01(eng);
        const double T = 0.1 + 2.9 * uniform01(eng);
        const std::uint64_t seed = eng();
        const auto spec = lambda < 0.5
                              ? LaplaceExponentSpec::alpha_stable(std::min(alpha, 1.0))
                              : LaplaceExponentSpec::tempered_stable(std::min(alpha, 1.0),
                                                                     lambda);

        std::vector<double> grid;
        for (int j = 0; j <= 8; ++j) grid.push_back(T * j / 8.0);
        const double delta = default_inverse_step(spec, T, 200.0);

        const auto path = sample_inverse_path(spec, grid, delta, RngStream{seed, 0});
        const auto rerun = sample_inverse_path(spec, grid, delta, RngStream{seed, 0});
        int bad = 0;
        if (path.values.size() != grid.size()) ++bad;
        for (std::size_t j = 0; j < path.values.size(); ++j) {
            if (!(path.values[j] >= 0.0)) ++bad;
            if (j > 0 && path.values[j] < path.values[j - 1]) ++bad;
            if (path.values[j] != rerun.values[j]) ++bad;
        }
        const double draw = sample_inverse_at(spec, T, delta, RngStream{seed, 1});
        const double draw2 = sample_inverse_at(spec, T, delta, RngStream{seed, 1});
        if (!(draw >= 0.0) || draw != draw2) ++bad;
        failures[static_cast<std::size_t>(i)] = bad;
    });

    int total = 0;
    for (int f : failures) total += f;
    out.require(total == 0, std::to_string(total) + " invariant violations");
    out.detail = std::to_string(configs) + " configurations clean";
    return out;
}

// 10. Figure-style sweep: smooth monotone curves, cross-method agreement,
// and the binomial method paying for its generality in wall time.
Outcome criterion10() {
    Outcome out;
    ExperimentConfig cfg = preset("fig2");
    cfg.output_path = "acceptance_fig2";
    const auto result = run_experiment(cfg);
    out.require(result.ok(), "sweep reported cell errors");
    if (!result.ok()) return out;

    auto column = [&](const std::string& method) {
        std::vector<SweepRow> rows;
        for (const auto& row : result.rows) {
            if (row.method == method) rows.push_back(row);
        }
        return rows;
    };
    const auto mc = column("MC-closed-form");
    const auto crr = column("MC-CRR");
    const auto fd = column("FD-PDE");
    out.require(mc.size() == cfg.alpha_grid.size() && crr.size() == mc.size() &&
                    fd.size() == mc.size(),
                "missing rows");
    if (!out.pass) return out;

    for (const auto* rows : {&mc, &crr, &fd}) {
        for (std::size_t i = 1; i < rows->size(); ++i) {
            const auto& prev = (*rows)[i - 1];
            const auto& cur = (*rows)[i];
            const double slack =
                3.0 * (prev.std_error + cur.std_error) + 2e-3;
            out.require(cur.value >= prev.value - slack,
                        (*rows)[i].method + " not monotone at alpha=" + fmt(cur.alpha));
            out.require(std::abs(cur.value - prev.value) < 0.2,
                        (*rows)[i].method + " jump at alpha=" + fmt(cur.alpha));
        }
    }

    double t_mc = 0.0, t_crr = 0.0, t_fd = 0.0;
    for (std::size_t i = 0; i < mc.size(); ++i) {
        const double tol_crr =
            3.0 * std::max(mc[i].std_error, crr[i].std_error) + 5e-3;
        out.require(std::abs(mc[i].value - crr[i].value) < tol_crr,
                    "MC vs CRR at alpha=" + fmt(mc[i].alpha) + ": " +
                        fmt(std::abs(mc[i].value - crr[i].value)) + " >= " + fmt(tol_crr));
        const double tol_fd = 3.0 * mc[i].std_error + 0.01 * mc[i].value;
        out.require(std::abs(mc[i].value - fd[i].value) < tol_fd,
                    "MC vs FD at alpha=" + fmt(mc[i].alpha) + ": " +
                        fmt(std::abs(mc[i].value - fd[i].value)) + " >= " + fmt(tol_fd));
        t_mc += mc[i].elapsed_ms;
        t_crr += crr[i].elapsed_ms;
        t_fd += fd[i].elapsed_ms;
    }

    out.require(t_crr > t_fd, "CRR total " + fmt(t_crr) + "ms not slower than FD " +
                                  fmt(t_fd) + "ms");
    out.require(t_crr > t_mc, "CRR total " + fmt(t_crr) + "ms not slower than MC " +
                                  fmt(t_mc) + "ms");
    out.detail = "timings ms: MC=" + fmt(t_mc) + " CRR=" + fmt(t_crr) +
                 " FD=" + fmt(t_fd);
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        double budget_s;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> plan = {
        {1, "classical-limit reduction", 1.0, criterion1},
        {2, "inverse-clock first moment", 60.0, criterion2},
        {3, "Bachelier/Black-Scholes gap bound", 300.0, criterion3},
        {4, "put-call parity on shared draws", 30.0, criterion4},
        {5, "binomial convergence at desk scale", 180.0, criterion5},
        {6, "fractional PDE cross-check", 120.0, criterion6},
        {7, "lookback closed form and path MC", 300.0, criterion7},
        {8, "American early-exercise dominance", 180.0, criterion8},
        {9, "path invariants fuzz", 120.0, criterion9},
        {10, "figure sweep reproduction", 1e9, criterion10},
    };

    bool all_pass = true;
    for (const auto& entry : plan) {
        const auto start = Clock::now();
        Outcome out;
        try {
            out = entry.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(Clock::now() - start).count();
        if (seconds > entry.budget_s) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + std::string("runtime ") +
                          fmt(seconds) + "s over budget " + fmt(entry.budget_s) + "s";
        }
        std::printf("[%s] criterion %2d: %s (%.1fs) %s\n", out.pass ? "PASS" : "FAIL",
                    entry.id, entry.label, seconds,
                    out.detail.empty() ? "" : ("- " + out.detail).c_str());
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
