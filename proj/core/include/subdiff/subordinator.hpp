#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subdiff/rng.hpp"

namespace subdiff {

/// Thrown when the first-passage walk exceeds its step budget.
struct StepBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SubordinatorFamily { AlphaStable, TemperedStable, Identity };

/// Parametric Laplace exponent psi(u) identifying the driving subordinator:
///   AlphaStable     psi(u) = u^alpha,                 0 < alpha < 1
///   TemperedStable  psi(u) = (u+lambda)^alpha - lambda^alpha, lambda > 0
///   Identity        psi(u) = u, the degenerate clock S(t) = t
///
/// alpha = 1 and lambda = 0 are normalized at construction: a tempered spec
/// with lambda = 0 collapses to AlphaStable, and alpha = 1 collapses to
/// Identity (the classical limit).
class LaplaceExponentSpec {
  public:
    static LaplaceExponentSpec alpha_stable(double alpha);
    static LaplaceExponentSpec tempered_stable(double alpha, double lambda);
    static LaplaceExponentSpec identity();
    static LaplaceExponentSpec make(SubordinatorFamily family, double alpha,
                                    double lambda);

    [[nodiscard]] SubordinatorFamily family() const { return family_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double lambda() const { return lambda_; }

    /// Laplace exponent value psi(u), u >= 0.
    [[nodiscard]] double psi(double u) const;

    [[nodiscard]] std::string name() const;

  private:
    LaplaceExponentSpec(SubordinatorFamily family, double alpha, double lambda)
        : family_(family), alpha_(alpha), lambda_(lambda) {}

    SubordinatorFamily family_;
    double alpha_;
    double lambda_;
};

/// Discretized subordinator realization U(k*step), k = 0, 1, ...;
/// values are strictly increasing with values[0] = 0.
struct SubordinatorPath {
    double step = 0.0;
    std::vector<double> values;
};

/// Inverse-subordinator realization on a time grid; values nondecreasing.
struct InversePath {
    std::vector<double> times;
    std::vector<double> values;
};

inline constexpr std::uint64_t kDefaultMaxFirstPassageSteps = 100'000'000;

/// One increment U(dt) of the alpha-stable subordinator (Kanter sampler,
/// exact in distribution; dt enters through 1/alpha self-similar scaling).
double sample_stable_subordinator_increment(double alpha, double dt,
                                            std::mt19937_64& eng);
double sample_stable_subordinator_increment(double alpha, double dt,
                                            RngStream rng);

/// Discretized driving subordinator: values[k] = U(k * step), k = 0..steps.
SubordinatorPath sample_subordinator_path(const LaplaceExponentSpec& spec,
                                          std::uint64_t steps, double step,
                                          RngStream rng);

/// One increment of the tempered-stable subordinator via exponential
/// tilting: stable proposals accepted with probability exp(-lambda x).
/// dt is subdivided internally whenever a piece's acceptance rate would
/// drop below 0.1.
double sample_tempered_increment(double alpha, double lambda, double dt,
                                 std::mt19937_64& eng);
double sample_tempered_increment(double alpha, double lambda, double dt,
                                 RngStream rng);

/// Staircase first-passage draw of the inverse subordinator:
///   S_delta(t) = delta * (min{k >= 1 : U(k*delta) > t} - 1),
/// which brackets the exact S(t) within [S_delta, S_delta + delta] on the
/// same driving noise. Throws StepBudgetExceeded past max_steps.
double sample_inverse_at(const LaplaceExponentSpec& spec, double t,
                         double delta, std::mt19937_64& eng,
                         std::uint64_t max_steps = kDefaultMaxFirstPassageSteps);
double sample_inverse_at(const LaplaceExponentSpec& spec, double t,
                         double delta, RngStream rng,
                         std::uint64_t max_steps = kDefaultMaxFirstPassageSteps);

/// Inverse-subordinator path on an increasing grid, evaluated consistently
/// from a single driving realization. times must be nonempty, start >= 0,
/// and be strictly increasing.
InversePath sample_inverse_path(const LaplaceExponentSpec& spec,
                                std::span<const double> times, double delta,
                                RngStream rng,
                                std::uint64_t max_steps = kDefaultMaxFirstPassageSteps);

/// Analytic moment E S^k(t) = t^{k alpha} Gamma(k+1) / Gamma(k alpha + 1)
/// of the alpha-stable inverse subordinator (alpha = 1 gives t^k).
double inverse_moment(double alpha, double k, double t);

/// Default staircase step: targets roughly `target_steps` subordinator
/// increments per draw, using the mean of S(t) (or a proxy for the
/// tempered family) as the scale.
double default_inverse_step(const LaplaceExponentSpec& spec, double t,
                            double target_steps = 1e4);

/// Writes "t,S_t" rows for an inverse path (the CLI `simulate` dump format).
void write_inverse_path_csv(const InversePath& path, const std::string& file);

}  // namespace subdiff
