#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "losses.hpp"
#include "oracles.hpp"

using askl::label;
using askl::loss_gradient;
using askl::loss_kind;
using askl::loss_value;

TEST_CASE("hinge is zero with zero gradient at a comfortable margin") {
    std::vector<double> f{2.0, 0.5, 0.0};
    label y = label::of_class(0);
    CHECK(loss_value(loss_kind::multiclass_hinge, f, y) == 0.0);
    std::vector<double> g = loss_gradient(loss_kind::multiclass_hinge, f, y);
    CHECK(g == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("hinge penalizes a violated margin and moves both scores") {
    std::vector<double> f{0.2, 0.5, 0.0};
    label y = label::of_class(0);
    CHECK(loss_value(loss_kind::multiclass_hinge, f, y) ==
          doctest::Approx(1.3).epsilon(1e-15));
    std::vector<double> g = loss_gradient(loss_kind::multiclass_hinge, f, y);
    CHECK(g == std::vector<double>{-1.0, 1.0, 0.0});
}

TEST_CASE("hinge gradient vanishes when the margin is exactly met") {
    std::vector<double> f{1.5, 0.5, -3.0};
    label y = label::of_class(0);
    CHECK(loss_value(loss_kind::multiclass_hinge, f, y) == 0.0);
    std::vector<double> g = loss_gradient(loss_kind::multiclass_hinge, f, y);
    CHECK(g == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("hinge competitor ties break to the lowest index") {
    std::vector<double> f{0.0, 0.7, 0.7};
    label y = label::of_class(0);
    std::vector<double> g = loss_gradient(loss_kind::multiclass_hinge, f, y);
    CHECK(g == std::vector<double>{-1.0, 1.0, 0.0});
}

TEST_CASE("hinge matches a directional finite difference away from its kinks") {
    std::mt19937_64 gen(40);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    int tested = 0;
    while (tested < 25) {
        std::vector<double> f{unif(gen), unif(gen), unif(gen), unif(gen)};
        label y = label::of_class(static_cast<std::size_t>(tested) % 4);
        std::size_t c = y.class_index();
        double best = -1e300;
        std::size_t best_j = 0;
        int leaders = 0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (j == c) continue;
            if (f[j] > best + 1e-9) {
                best = f[j];
                best_j = j;
                leaders = 1;
            } else if (std::fabs(f[j] - best) <= 1e-9) {
                ++leaders;
            }
        }
        double margin = f[c] - best;
        if (std::fabs(margin - 1.0) < 1e-3 || leaders > 1) continue;
        ++tested;

        std::vector<double> g = loss_gradient(loss_kind::multiclass_hinge, f, y);
        const double eps = 1e-6;
        for (std::size_t j = 0; j < f.size(); ++j) {
            std::vector<double> hi = f, lo = f;
            hi[j] += eps;
            lo[j] -= eps;
            double fd = (loss_value(loss_kind::multiclass_hinge, hi, y) -
                         loss_value(loss_kind::multiclass_hinge, lo, y)) /
                        (2.0 * eps);
            CHECK(std::fabs(fd - g[j]) <= 1e-6);
        }
        if (margin < 1.0) {
            CHECK(g[c] == -1.0);
            CHECK(g[best_j] == 1.0);
        }
    }
}

TEST_CASE("hinge changes by at most twice the largest score change") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> f(5), g(5);
        double max_diff = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            f[j] = unif(gen);
            g[j] = unif(gen);
            max_diff = std::max(max_diff, std::fabs(f[j] - g[j]));
        }
        label y = label::of_class(static_cast<std::size_t>(rep) % 5);
        double gap = std::fabs(loss_value(loss_kind::multiclass_hinge, f, y) -
                               loss_value(loss_kind::multiclass_hinge, g, y));
        CHECK(gap <= 2.0 * max_diff + 1e-12);
    }
}

TEST_CASE("squared loss on a plain target matches its closed form") {
    std::vector<double> f{1.0, 2.0};
    label y = label::of_target({0.0, 0.0});
    CHECK(loss_value(loss_kind::squared, f, y) == doctest::Approx(5.0).epsilon(1e-15));
    std::vector<double> g = loss_gradient(loss_kind::squared, f, y);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("squared loss encodes class labels one-hot") {
    std::vector<double> f{0.25, -0.5, 1.0};
    label y = label::of_class(2);
    double expected = 0.25 * 0.25 + 0.5 * 0.5 + 0.0;
    CHECK(loss_value(loss_kind::squared, f, y) ==
          doctest::Approx(expected).epsilon(1e-15));
    std::vector<double> g = loss_gradient(loss_kind::squared, f, y);
    CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(g[2] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("squared gradient matches a finite difference") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> f(4), t(4);
        for (std::size_t j = 0; j < 4; ++j) {
            f[j] = unif(gen);
            t[j] = unif(gen);
        }
        label y = label::of_target(t);
        std::vector<double> g = loss_gradient(loss_kind::squared, f, y);
        const double eps = 1e-6;
        for (std::size_t j = 0; j < 4; ++j) {
            std::vector<double> hi = f, lo = f;
            hi[j] += eps;
            lo[j] -= eps;
            double fd = (loss_value(loss_kind::squared, hi, y) -
                         loss_value(loss_kind::squared, lo, y)) /
                        (2.0 * eps);
            CHECK(std::fabs(fd - g[j]) <= 1e-7 * std::max(1.0, std::fabs(g[j])));
        }
    }
}

TEST_CASE("loss shape mismatches are rejected") {
    std::vector<double> f{1.0, 2.0};
    CHECK_THROWS_AS(loss_value(loss_kind::multiclass_hinge, f, label::of_class(2)),
                    askl::argument_error);
    CHECK_THROWS_AS(loss_value(loss_kind::multiclass_hinge, f,
                               label::of_target({1.0, 0.0})),
                    askl::argument_error);
    CHECK_THROWS_AS(loss_gradient(loss_kind::multiclass_hinge,
                                  std::vector<double>{1.0}, label::of_class(0)),
                    askl::argument_error);
    CHECK_THROWS_AS(loss_value(loss_kind::squared, f, label::of_target({1.0})),
                    askl::argument_error);
    CHECK_THROWS_AS(loss_value(loss_kind::squared, f, label::of_class(5)),
                    askl::argument_error);
    CHECK_THROWS_AS(label::of_class(1).target(), askl::argument_error);
    CHECK_THROWS_AS(label::of_target({1.0}).class_index(), askl::argument_error);
}
