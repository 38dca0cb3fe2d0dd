#include "subdiff/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "subdiff/special_math.hpp"

namespace subdiff {

namespace {

void require_stable_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::domain_error("stable subordinator requires alpha in (0,1), got " +
                                std::to_string(alpha));
    }
}

void require_positive(double x, const char* what) {
    if (!(x > 0.0)) {
        throw std::domain_error(std::string(what) + " must be positive, got " +
                                std::to_string(x));
    }
}

// Kanter representation of the unit positive stable law (E exp(-uX) =
// exp(-u^alpha)):  X = sin(a t) * sin(t)^(-1/a) * (sin((1-a)t)/W)^((1-a)/a),
// t uniform on (0,pi), W unit exponential.
double kanter_unit_stable(double alpha, std::mt19937_64& eng) {
    double theta, w, s;
    do {
        theta = std::numbers::pi * uniform01(eng);
        w = exponential1(eng);
        s = std::sin(theta);
    } while (theta == 0.0 || s == 0.0);
    double ratio = std::sin((1.0 - alpha) * theta) / w;
    return std::sin(alpha * theta) * std::pow(s, -1.0 / alpha) *
           std::pow(ratio, (1.0 - alpha) / alpha);
}

// Walks the staircase until U(k delta) > t and returns delta * (k - 1).
// The per-step increment law is supplied by `increment`.
template <typename Increment>
double first_passage(double t, double delta, std::uint64_t max_steps,
                     Increment&& increment) {
    double level = 0.0;
    std::uint64_t k = 0;
    while (level <= t) {
        if (++k > max_steps) {
            throw StepBudgetExceeded(
                "inverse-subordinator walk exceeded " + std::to_string(max_steps) +
                " steps (t=" + std::to_string(t) + ", delta=" + std::to_string(delta) + ")");
        }
        level += increment();
    }
    return delta * static_cast<double>(k - 1);
}

}  // namespace

LaplaceExponentSpec LaplaceExponentSpec::alpha_stable(double alpha) {
    return make(SubordinatorFamily::AlphaStable, alpha, 0.0);
}

LaplaceExponentSpec LaplaceExponentSpec::tempered_stable(double alpha, double lambda) {
    return make(SubordinatorFamily::TemperedStable, alpha, lambda);
}

LaplaceExponentSpec LaplaceExponentSpec::identity() {
    return LaplaceExponentSpec(SubordinatorFamily::Identity, 1.0, 0.0);
}

LaplaceExponentSpec LaplaceExponentSpec::make(SubordinatorFamily family,
                                              double alpha, double lambda) {
    if (family == SubordinatorFamily::Identity) return identity();
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::domain_error("alpha must lie in (0,1], got " + std::to_string(alpha));
    }
    if (lambda < 0.0) {
        throw std::domain_error("lambda must be nonnegative, got " + std::to_string(lambda));
    }
    // psi_{alpha,0} = psi_alpha, and alpha = 1 is the classical clock.
    if (alpha == 1.0) return identity();
    if (family == SubordinatorFamily::TemperedStable && lambda == 0.0) {
        family = SubordinatorFamily::AlphaStable;
    }
    if (family == SubordinatorFamily::AlphaStable) lambda = 0.0;
    return LaplaceExponentSpec(family, alpha, lambda);
}

double LaplaceExponentSpec::psi(double u) const {
    if (u < 0.0) throw std::domain_error("psi: u must be nonnegative");
    switch (family_) {
        case SubordinatorFamily::Identity:
            return u;
        case SubordinatorFamily::AlphaStable:
            return std::pow(u, alpha_);
        case SubordinatorFamily::TemperedStable:
            return std::pow(u + lambda_, alpha_) - std::pow(lambda_, alpha_);
    }
    return u;
}

std::string LaplaceExponentSpec::name() const {
    switch (family_) {
        case SubordinatorFamily::Identity:
            return "identity";
        case SubordinatorFamily::AlphaStable:
            return "alpha-stable(alpha=" + std::to_string(alpha_) + ")";
        case SubordinatorFamily::TemperedStable:
            return "tempered-stable(alpha=" + std::to_string(alpha_) +
                   ",lambda=" + std::to_string(lambda_) + ")";
    }
    return "unknown";
}

double sample_stable_subordinator_increment(double alpha, double dt,
                                            std::mt19937_64& eng) {
    require_stable_alpha(alpha);
    require_positive(dt, "dt");
    return std::pow(dt, 1.0 / alpha) * kanter_unit_stable(alpha, eng);
}

double sample_stable_subordinator_increment(double alpha, double dt, RngStream rng) {
    auto eng = rng.make_engine();
    return sample_stable_subordinator_increment(alpha, dt, eng);
}

double sample_tempered_increment(double alpha, double lambda, double dt,
                                 std::mt19937_64& eng) {
    require_stable_alpha(alpha);
    require_positive(lambda, "lambda");
    require_positive(dt, "dt");

    // Per piece, acceptance probability is exp(-dt_i lambda^alpha); keep it
    // above 0.1 by subdividing dt.
    const double lam_a = std::pow(lambda, alpha);
    const double max_piece = std::log(10.0) / lam_a;
    const auto pieces =
        static_cast<std::uint64_t>(std::max(1.0, std::ceil(dt / max_piece)));
    const double piece_dt = dt / static_cast<double>(pieces);
    const double scale = std::pow(piece_dt, 1.0 / alpha);

    double total = 0.0;
    for (std::uint64_t p = 0; p < pieces; ++p) {
        for (;;) {
            double x = scale * kanter_unit_stable(alpha, eng);
            if (uniform01(eng) < std::exp(-lambda * x)) {
                total += x;
                break;
            }
        }
    }
    return total;
}

double sample_tempered_increment(double alpha, double lambda, double dt, RngStream rng) {
    auto eng = rng.make_engine();
    return sample_tempered_increment(alpha, lambda, dt, eng);
}

SubordinatorPath sample_subordinator_path(const LaplaceExponentSpec& spec,
                                          std::uint64_t steps, double step,
                                          RngStream rng) {
    require_positive(step, "step");
    if (steps == 0) throw std::invalid_argument("sample_subordinator_path: steps == 0");

    SubordinatorPath path;
    path.step = step;
    path.values.reserve(steps + 1);
    path.values.push_back(0.0);

    auto eng = rng.make_engine();
    const double alpha = spec.alpha();
    for (std::uint64_t k = 0; k < steps; ++k) {
        double inc;
        switch (spec.family()) {
            case SubordinatorFamily::Identity:
                inc = step;
                break;
            case SubordinatorFamily::AlphaStable:
                inc = sample_stable_subordinator_increment(alpha, step, eng);
                break;
            case SubordinatorFamily::TemperedStable:
            default:
                inc = sample_tempered_increment(alpha, spec.lambda(), step, eng);
                break;
        }
        path.values.push_back(path.values.back() + inc);
    }
    return path;
}

double sample_inverse_at(const LaplaceExponentSpec& spec, double t, double delta,
                         std::mt19937_64& eng, std::uint64_t max_steps) {
    if (!(t > 0.0)) throw std::domain_error("sample_inverse_at: t must be positive");
    if (spec.family() == SubordinatorFamily::Identity) return t;
    require_positive(delta, "delta");

    const double alpha = spec.alpha();
    if (spec.family() == SubordinatorFamily::AlphaStable) {
        const double scale = std::pow(delta, 1.0 / alpha);
        return first_passage(t, delta, max_steps, [&] {
            return scale * kanter_unit_stable(alpha, eng);
        });
    }
    const double lambda = spec.lambda();
    return first_passage(t, delta, max_steps, [&] {
        return sample_tempered_increment(alpha, lambda, delta, eng);
    });
}

double sample_inverse_at(const LaplaceExponentSpec& spec, double t, double delta,
                         RngStream rng, std::uint64_t max_steps) {
    auto eng = rng.make_engine();
    return sample_inverse_at(spec, t, delta, eng, max_steps);
}

InversePath sample_inverse_path(const LaplaceExponentSpec& spec,
                                std::span<const double> times, double delta,
                                RngStream rng, std::uint64_t max_steps) {
    if (times.empty()) {
        throw std::invalid_argument("sample_inverse_path: empty time grid");
    }
    if (!(times.front() >= 0.0)) {
        throw std::invalid_argument("sample_inverse_path: grid must start at >= 0");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument(
                "sample_inverse_path: grid must be strictly increasing");
        }
    }

    InversePath path;
    path.times.assign(times.begin(), times.end());
    path.values.resize(times.size());

    if (spec.family() == SubordinatorFamily::Identity) {
        path.values = path.times;
        return path;
    }
    require_positive(delta, "delta");

    auto eng = rng.make_engine();
    const double alpha = spec.alpha();
    const double lambda = spec.lambda();
    const bool tempered = spec.family() == SubordinatorFamily::TemperedStable;
    const double scale = std::pow(delta, 1.0 / alpha);

    // One driving staircase serves the whole grid: advance U until it
    // crosses each grid time in turn.
    double level = 0.0;
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const double t = path.times[i];
        while (level <= t) {
            if (++k > max_steps) {
                throw StepBudgetExceeded(
                    "inverse-subordinator path walk exceeded " +
                    std::to_string(max_steps) + " steps");
            }
            level += tempered ? sample_tempered_increment(alpha, lambda, delta, eng)
                              : scale * kanter_unit_stable(alpha, eng);
        }
        path.values[i] = delta * static_cast<double>(k - 1);
    }
    return path;
}

double inverse_moment(double alpha, double k, double t) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::domain_error("inverse_moment: alpha must lie in (0,1]");
    }
    require_positive(k, "k");
    require_positive(t, "t");
    return std::pow(t, k * alpha) * gamma_fn(k + 1.0) / gamma_fn(k * alpha + 1.0);
}

double default_inverse_step(const LaplaceExponentSpec& spec, double t,
                            double target_steps) {
    require_positive(t, "t");
    require_positive(target_steps, "target_steps");
    if (spec.family() == SubordinatorFamily::Identity) return t / target_steps;

    double mean_s = inverse_moment(spec.alpha(), 1.0, t);
    if (spec.family() == SubordinatorFamily::TemperedStable) {
        // Long-horizon mean of the tempered inverse clock is
        // t / psi'(0) = t lambda^{1-alpha} / alpha; take the larger scale.
        double tempered_mean =
            t * std::pow(spec.lambda(), 1.0 - spec.alpha()) / spec.alpha();
        mean_s = std::max(mean_s, tempered_mean);
    }
    return mean_s / target_steps;
}

void write_inverse_path_csv(const InversePath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file + " for writing");
    out << "t,S_t\n";
    out.precision(17);
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        out << path.times[i] << ',' << path.values[i] << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + file);
}

}  // namespace subdiff
