#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fishsim/cmaes.hpp"

using namespace fishsim;

namespace {

double neg_sphere(const std::vector<double>& x) {
    double ss = 0.0;
    for (double v : x) ss += (v - 1.0) * (v - 1.0);
    return -ss;  // maximized at the all-ones point
}

}  // namespace

TEST_CASE("ask samples the requested population") {
    CmaState state(232, 0.5, 3);
    const auto pop = state.ask(120);
    REQUIRE(pop.size() == 120);
    for (const auto& g : pop) CHECK(g.size() == 232);

    SUBCASE("degenerate step size collapses onto the mean") {
        CmaState tiny(10, 1e-12, 5);
        for (const auto& g : tiny.ask(20))
            for (double v : g) CHECK(std::abs(v) < 1e-9);
    }

    SUBCASE("fixed seed reproduces the population") {
        CmaState a(50, 0.5, 9), b(50, 0.5, 9);
        const auto pa = a.ask(30);
        const auto pb = b.ask(30);
        CHECK(pa == pb);
    }
}

TEST_CASE("tell handles degenerate rankings") {
    CmaState state(10, 0.5, 1);
    const auto pop = state.ask(20);
    std::vector<double> equal(pop.size(), 1.0);
    state.tell(pop, equal);
    CHECK(state.sigma() > 0.0);
    CHECK(std::isfinite(state.sigma()));

    CHECK_THROWS_AS(state.tell(pop, std::vector<double>(3, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("covariance stays symmetric across updates") {
    CmaState state(8, 0.3, 4);
    for (int gen = 0; gen < 30; ++gen) {
        const auto pop = state.ask(16);
        std::vector<double> fit(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = neg_sphere(pop[i]);
        state.tell(pop, fit);
        const auto& c = state.covariance();
        CHECK((c - c.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("optimizes the 10-D sphere in 5/5 seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CmaState state(10, 0.5, seed);
        double best = std::numeric_limits<double>::infinity();
        for (int gen = 0; gen < 200 && best >= 1e-6; ++gen) {
            const auto pop = state.ask(20);
            std::vector<double> fit(pop.size());
            for (std::size_t i = 0; i < pop.size(); ++i) {
                fit[i] = neg_sphere(pop[i]);
                best = std::min(best, -fit[i]);
            }
            state.tell(pop, fit);
        }
        CHECK(best < 1e-6);
    }
}

TEST_CASE("rank invariance under monotone fitness transforms") {
    CmaState a(12, 0.4, 17), b(12, 0.4, 17);
    for (int gen = 0; gen < 20; ++gen) {
        const auto pop_a = a.ask(24);
        const auto pop_b = b.ask(24);
        REQUIRE(pop_a == pop_b);
        std::vector<double> fit_a(pop_a.size()), fit_b(pop_a.size());
        for (std::size_t i = 0; i < pop_a.size(); ++i) {
            fit_a[i] = neg_sphere(pop_a[i]);
            fit_b[i] = std::exp(0.3 * fit_a[i]) + 7.0;  // strictly increasing
        }
        a.tell(pop_a, fit_a);
        b.tell(pop_b, fit_b);
        CHECK(a.sigma() == b.sigma());
        CHECK(a.mean() == b.mean());
    }
}

TEST_CASE("checkpoint round-trip preserves ask output bit-exactly") {
    CmaState state(15, 0.4, 23);
    for (int gen = 0; gen < 5; ++gen) {
        const auto pop = state.ask(12);
        std::vector<double> fit(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = neg_sphere(pop[i]);
        state.tell(pop, fit);
    }
    std::stringstream buffer;
    state.save(buffer);
    CmaState restored = CmaState::load(buffer);
    CHECK(restored.ask(12) == state.ask(12));
}

TEST_CASE("run_cmaes budget and monotone best") {
    CmaConfig cfg;
    cfg.dim = 10;
    cfg.lambda = 20;
    cfg.generations = 30;
    cfg.seed = 2;
    const CmaResult result = run_cmaes(cfg, neg_sphere);
    REQUIRE(result.history.size() == 30);
    CHECK(result.history.back().evals == 600);
    for (std::size_t i = 1; i < result.history.size(); ++i)
        CHECK(result.history[i].best >= result.history[i - 1].best);

    SUBCASE("paper budget identity") {
        CmaConfig paper;
        CHECK(paper.total_budget() == 60000);
    }

    SUBCASE("identical seeds give identical histories") {
        const CmaResult again = run_cmaes(cfg, neg_sphere);
        REQUIRE(again.history.size() == result.history.size());
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            CHECK(again.history[i].best == result.history[i].best);
            CHECK(again.history[i].median == result.history[i].median);
            CHECK(again.history[i].sigma == result.history[i].sigma);
        }
        CHECK(again.best_genome == result.best_genome);
    }
}
