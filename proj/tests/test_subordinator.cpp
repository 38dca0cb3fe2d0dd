#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "subdiff/rng.hpp"
#include "subdiff/special_math.hpp"
#include "subdiff/subordinator.hpp"

using namespace subdiff;

TEST_CASE("spec construction normalizes the degenerate corners") {
    const auto stable = LaplaceExponentSpec::alpha_stable(0.7);
    CHECK(stable.family() == SubordinatorFamily::AlphaStable);
    CHECK(stable.alpha() == 0.7);

    // lambda = 0 tempering is plain stable; alpha = 1 is the classical clock
    CHECK(LaplaceExponentSpec::tempered_stable(0.7, 0.0).family() ==
          SubordinatorFamily::AlphaStable);
    CHECK(LaplaceExponentSpec::alpha_stable(1.0).family() ==
          SubordinatorFamily::Identity);
    CHECK(LaplaceExponentSpec::tempered_stable(1.0, 2.0).family() ==
          SubordinatorFamily::Identity);

    CHECK_THROWS_AS(LaplaceExponentSpec::alpha_stable(0.0), std::domain_error);
    CHECK_THROWS_AS(LaplaceExponentSpec::alpha_stable(1.5), std::domain_error);
    CHECK_THROWS_AS(LaplaceExponentSpec::tempered_stable(0.5, -1.0), std::domain_error);
}

TEST_CASE("laplace exponent values") {
    const auto stable = LaplaceExponentSpec::alpha_stable(0.5);
    CHECK(stable.psi(4.0) == doctest::Approx(2.0));
    const auto tempered = LaplaceExponentSpec::tempered_stable(0.5, 1.0);
    CHECK(tempered.psi(3.0) == doctest::Approx(1.0));
    CHECK(tempered.psi(0.0) == doctest::Approx(0.0));
    CHECK(LaplaceExponentSpec::identity().psi(3.25) == doctest::Approx(3.25));
}

TEST_CASE("stable increments are positive and deterministic per stream") {
    const RngStream rng{123, 7};
    const double a = sample_stable_subordinator_increment(0.7, 1.0, rng);
    const double b = sample_stable_subordinator_increment(0.7, 1.0, rng);
    CHECK(a > 0.0);
    CHECK(a == b);

    const double other = sample_stable_subordinator_increment(0.7, 1.0, RngStream{123, 8});
    CHECK(other != a);

    CHECK_THROWS_AS(sample_stable_subordinator_increment(1.0, 1.0, rng),
                    std::domain_error);
    CHECK_THROWS_AS(sample_stable_subordinator_increment(0.7, 0.0, rng),
                    std::domain_error);
}

TEST_CASE("tempered increments are positive and reject bad parameters") {
    auto eng = RngStream{9, 0}.make_engine();
    for (int i = 0; i < 200; ++i) {
        CHECK(sample_tempered_increment(0.7, 1.0, 1.0, eng) > 0.0);
    }
    CHECK_THROWS_AS(sample_tempered_increment(0.7, 0.0, 1.0, eng), std::domain_error);
    CHECK_THROWS_AS(sample_tempered_increment(1.2, 1.0, 1.0, eng), std::domain_error);
}

TEST_CASE("identity clock is exact") {
    const auto id = LaplaceExponentSpec::identity();
    CHECK(sample_inverse_at(id, 2.0, 0.25, RngStream{0, 0}) == 2.0);
    CHECK(sample_inverse_at(id, 0.37, 0.25, RngStream{5, 5}) == 0.37);

    const std::vector<double> grid{0.0, 0.5, 1.0};
    const auto path = sample_inverse_path(id, grid, 0.1, RngStream{0, 0});
    CHECK(path.values == grid);
}

TEST_CASE("inverse draws are nonnegative, reproducible, and respect the step cap") {
    const auto spec = LaplaceExponentSpec::alpha_stable(0.7);
    const double s1 = sample_inverse_at(spec, 1.0, 1e-3, RngStream{77, 0});
    const double s2 = sample_inverse_at(spec, 1.0, 1e-3, RngStream{77, 0});
    CHECK(s1 >= 0.0);
    CHECK(s1 == s2);

    // tiny budget forces the resource error
    CHECK_THROWS_AS(sample_inverse_at(spec, 1.0, 1e-9, RngStream{77, 0}, 10),
                    StepBudgetExceeded);
}

TEST_CASE("inverse paths are nondecreasing and grid-validated") {
    const auto spec = LaplaceExponentSpec::alpha_stable(0.7);
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i * 0.01);

    for (std::uint64_t stream = 0; stream < 32; ++stream) {
        const auto path = sample_inverse_path(spec, grid, 1e-3, RngStream{11, stream});
        REQUIRE(path.values.size() == grid.size());
        CHECK(path.values.front() == 0.0);
        for (std::size_t i = 1; i < path.values.size(); ++i) {
            CHECK(path.values[i] >= path.values[i - 1]);
        }
    }

    const std::vector<double> empty;
    CHECK_THROWS_AS(sample_inverse_path(spec, empty, 1e-3, RngStream{0, 0}),
                    std::invalid_argument);
    const std::vector<double> unsorted{0.0, 0.5, 0.4};
    CHECK_THROWS_AS(sample_inverse_path(spec, unsorted, 1e-3, RngStream{0, 0}),
                    std::invalid_argument);
    const std::vector<double> negative{-0.5, 0.5};
    CHECK_THROWS_AS(sample_inverse_path(spec, negative, 1e-3, RngStream{0, 0}),
                    std::invalid_argument);
}

TEST_CASE("halving the step on the same driving path never lowers the draw") {
    // Build one driving staircase at resolution delta/2, then read the first
    // passage off the fine path and off its even-index coarsening.
    const double alpha = 0.7;
    const double t = 1.0;
    const double delta = 0.02;
    auto eng = RngStream{2024, 3}.make_engine();

    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> levels{0.0};
        while (levels.back() <= t) {
            levels.push_back(levels.back() +
                             sample_stable_subordinator_increment(alpha, delta / 2.0, eng));
        }
        auto passage = [&](std::size_t stride, double step) {
            std::size_t k = 1;
            while (k * stride < levels.size() && levels[k * stride] <= t) ++k;
            return step * static_cast<double>(k - 1);
        };
        // Extend so the coarse view also crosses t.
        while (levels.size() % 2 != 1 || levels.back() <= t) {
            levels.push_back(levels.back() +
                             sample_stable_subordinator_increment(alpha, delta / 2.0, eng));
        }
        const double fine = passage(1, delta / 2.0);
        const double coarse = passage(2, delta);
        CHECK(fine >= coarse);
        CHECK(fine <= coarse + delta);
    }
}

TEST_CASE("analytic inverse moments") {
    CHECK(inverse_moment(1.0, 1.0, 3.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(inverse_moment(0.7, 1.0, 1.0) ==
          doctest::Approx(1.0 / gamma_fn(1.7)).epsilon(1e-13));
    CHECK(std::abs(inverse_moment(0.7, 1.0, 1.0) - 1.10055) < 5e-6);
    CHECK(inverse_moment(0.7, 1.5, 2.0) ==
          doctest::Approx(std::pow(2.0, 1.05) * gamma_fn(2.5) / gamma_fn(2.05))
              .epsilon(1e-13));
    CHECK(inverse_moment(0.5, 2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-13));

    CHECK_THROWS_AS(inverse_moment(0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(inverse_moment(1.2, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(inverse_moment(0.7, -1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(inverse_moment(0.7, 1.0, 0.0), std::domain_error);
}

TEST_CASE("driving subordinator paths start at zero and strictly increase") {
    for (const auto& spec :
         {LaplaceExponentSpec::alpha_stable(0.6),
          LaplaceExponentSpec::tempered_stable(0.6, 1.5),
          LaplaceExponentSpec::identity()}) {
        const auto path = sample_subordinator_path(spec, 500, 0.01, RngStream{31, 4});
        REQUIRE(path.values.size() == 501);
        CHECK(path.values.front() == 0.0);
        CHECK(path.step == 0.01);
        for (std::size_t k = 1; k < path.values.size(); ++k) {
            CHECK(path.values[k] > path.values[k - 1]);
        }
    }
    CHECK_THROWS_AS(sample_subordinator_path(LaplaceExponentSpec::identity(), 0, 0.01,
                                             RngStream{0, 0}),
                    std::invalid_argument);
}

TEST_CASE("default step targets the requested walk length") {
    const auto spec = LaplaceExponentSpec::alpha_stable(0.7);
    const double delta = default_inverse_step(spec, 1.0, 1e4);
    CHECK(inverse_moment(0.7, 1.0, 1.0) / delta == doctest::Approx(1e4));
}
