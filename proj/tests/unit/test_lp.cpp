#include "dpsched/chain.hpp"
#include "dpsched/error.hpp"
#include "dpsched/lp.hpp"
#include "specs.hpp"

#include <doctest.h>

#include <sstream>

using namespace dpsched;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double objective_at(const LpProblem& lp, const std::vector<double>& x)
{
    return lp.program.objective_offset + dot(lp.program.objective, x);
}

} // namespace

TEST_SUITE("lp")
{
    TEST_CASE("xi constant")
    {
        CHECK(xi_constant({0.575, 0.3, 0.125}) == doctest::Approx(0.125));
        CHECK(xi_constant({0.5, 0.5}) == 0.0);
        CHECK(xi_constant({0.4, 0.3, 0.2, 0.1}) == doctest::Approx(0.5));
    }

    TEST_CASE("r coefficients")
    {
        auto r = r_coeffs({0.575, 0.3, 0.125});
        REQUIRE(r.size() == 2);
        CHECK(r[0] == doctest::Approx(0.425));
        CHECK(r[1] == doctest::Approx(0.125));
        CHECK(r_coeffs({0.5, 0.5}) == std::vector<double>{0.5});
        try {
            r_coeffs({1.0});
            FAIL("expected DegenerateArrivals");
        }
        catch (const Error& e) {
            CHECK(e.code() == Errc::DegenerateArrivals);
        }
    }

    TEST_CASE("G matrix rows")
    {
        auto g = build_g(testing::two_channel(6)).g;
        CHECK(g.rows() == 7);
        CHECK(g.cols() == 14);
        CHECK(g(0, 0) == doctest::Approx(0.6 / 0.425));
        CHECK(g(0, 1) == doctest::Approx(0.4 / 0.425));
        for (int j = 2; j < 14; ++j)
            CHECK(g(0, j) == 0.0);
        // second row: (l_2 - r_1 g_1) / r_0
        CHECK(g(1, 0) == doctest::Approx(-0.125 * 0.6 / 0.425 / 0.425));
        CHECK(g(1, 2) == doctest::Approx(0.6 / 0.425));

        auto b = build_g(testing::bernoulli(4)).g;
        for (int k = 0; k <= 4; ++k)
            for (int j = 0; j < 5; ++j)
                CHECK(b(k, j) == (j == k ? 2.0 : 0.0));
    }

    TEST_CASE("problem shape")
    {
        auto s = testing::two_channel(10);
        auto lp = build_lp(s, 2.0);
        CHECK(lp.program.num_vars() == 22 + 11);
        int eq = 0, le = 0;
        for (const auto& r : lp.program.rows)
            (r.sense == Sense::Equal ? eq : le)++;
        CHECK(eq == 10 + 1);
        CHECK(le == 1 + 22);
        for (const auto& r : lp.program.rows)
            CHECK(r.rhs >= 0.0);
    }

    TEST_CASE("cut equations match the occupancy map")
    {
        // Any y together with the pi the map assigns it satisfies every
        // equality row, so eliminating pi gives the LP in y alone.
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 0.1);
        for (int t = 0; t < 20; ++t) {
            auto s = testing::random_spec(rng, 7, 3, 3);
            auto lp = build_lp(s, 1.0);
            auto map = occupancy_map(s, build_g(s));
            std::vector<double> y((s.K() + 1) * s.W());
            for (double& v : y)
                v = u(rng);
            for (int w = 0; w < s.W(); ++w)
                y[s.K() * s.W() + w] = 0.0;
            auto x = y;
            for (double p : map.apply(y))
                x.push_back(p);
            for (const auto& r : lp.program.rows)
                if (r.sense == Sense::Equal)
                    CHECK(dot(r.coef, x) == doctest::Approx(r.rhs).epsilon(1e-12));
        }
    }

    TEST_CASE("objective equals mean queue over abar for any y")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 0.1);
        for (int t = 0; t < 20; ++t) {
            auto s = testing::random_spec(rng, 7, 3, 3);
            auto lp = build_lp(s, 1.0);
            std::vector<double> y((s.K() + 1) * s.W());
            for (double& v : y)
                v = u(rng);
            for (int w = 0; w < s.W(); ++w)
                y[s.K() * s.W() + w] = 0.0; // pinned by the LP
            auto pi = occupancy_map(s, build_g(s)).apply(y);
            double q = 0.0;
            for (int k = 0; k <= s.K(); ++k)
                q += k * pi[k];
            auto x = y;
            x.insert(x.end(), pi.begin(), pi.end());
            CHECK(objective_at(lp, x) == doctest::Approx(q / s.mean_arrival()).epsilon(1e-12));

            // the same value in the unscaled form plus the boundary term
            double first = 0.0;
            for (int k = 0; k <= s.K(); ++k)
                for (int w = 0; w < s.W(); ++w)
                    first += k * s.eta(w) * y[k * s.W() + w];
            double abar = s.mean_arrival();
            double paper = (first - xi_constant(s.arrival_probs()) + boundary_term(s, pi)) / (abar * abar);
            CHECK(paper == doctest::Approx(q / abar).epsilon(1e-12));

            // served rate = arrivals minus what the buffer drops
            double served = 0.0;
            for (int k = 0; k < s.K(); ++k)
                for (int w = 0; w < s.W(); ++w)
                    served += s.eta(w) * y[k * s.W() + w];
            double dropped = dot(lp.overflow_coef, pi);
            CHECK(served == doctest::Approx(abar - dropped).epsilon(1e-12));
        }
    }

    TEST_CASE("bernoulli: delay zero at half a unit of power")
    {
        auto s = validate_spec({{0.5, 0.5}, {1.0}, {1.0}, 8});
        auto sol = solve(build_lp(s, 0.5));
        CHECK(sol.delay == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(sol.y_at(0, 0) == doctest::Approx(0.5));
        CHECK(sol.power == doctest::Approx(0.5));
    }

    TEST_CASE("budgets")
    {
        auto s = testing::two_channel(12);
        CHECK_THROWS_AS(solve(build_lp(s, -1.0)), Error);
        // zero budget: the only schedule is silence and the buffer fills
        auto zero = solve(build_lp(s, 0.0));
        CHECK(zero.delay == doctest::Approx(12 / 0.55));
        CHECK(zero.power == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("saturation budget reproduces always-transmit delay")
    {
        auto s = testing::two_channel(30);
        auto ref = analyze(s, always_transmit(s)).metrics;
        for (double p : {ref.power, ref.power + 0.5, 10.0}) {
            auto sol = solve(build_lp(s, p));
            CHECK(sol.delay == doctest::Approx(ref.delay).epsilon(1e-10));
        }
        CHECK(saturation_power(s) == doctest::Approx(3.36886).epsilon(1e-12));
    }

    TEST_CASE("frozen optimum values from an independent enumeration")
    {
        auto s = testing::two_channel(30);
        std::vector<std::pair<double, double>> frozen{{1.8, 4.508159929287821},
                                                      {2.0, 2.8694133780588347},
                                                      {2.5, 1.3794515846921704},
                                                      {3.0, 0.8762628778569647},
                                                      {3.5, 0.5050505050504995}};
        for (auto [p, d] : frozen) {
            auto sol = solve(build_lp(s, p));
            CHECK(sol.delay == doctest::Approx(d).epsilon(1e-9));
            CHECK(sol.power <= p + 1e-9);
        }
    }

    TEST_CASE("stabilising power")
    {
        auto s = testing::two_channel(30);
        CHECK(min_stable_power(s) == doctest::Approx(0.4 * 0.103 + 0.15 * 10.14).epsilon(1e-14));

        // oracle: the fluid program min sum P_w x_w, sum x_w = abar, x_w <= eta_w
        std::mt19937_64 rng(2);
        for (int t = 0; t < 20; ++t) {
            auto r = testing::random_spec(rng, 5, 4, 2);
            LinearProgram lp;
            lp.objective = r.channel_powers();
            lp.var_names = {"x1", "x2", "x3", "x4"};
            lp.rows.push_back({std::vector<double>(4, 1.0), Sense::Equal, r.mean_arrival(), "rate"});
            for (int w = 0; w < 4; ++w) {
                std::vector<double> e(4, 0.0);
                e[w] = 1.0;
                lp.rows.push_back({e, Sense::LessEq, r.eta(w), "cap"});
            }
            auto res = simplex_solve(lp);
            REQUIRE(res.status == LpStatus::Optimal);
            CHECK(min_stable_power(r) == doctest::Approx(res.objective).epsilon(1e-12));
        }
    }

    TEST_CASE("delay does not increase with the budget")
    {
        auto s = testing::two_channel(25);
        double prev = 1e300;
        for (double p = 1.6; p <= 4.0; p += 0.1) {
            auto sol = solve(build_lp(s, p));
            CHECK(sol.delay <= prev + 1e-10);
            prev = sol.delay;
        }
    }

    TEST_CASE("channel ordering of the optimal y")
    {
        std::mt19937_64 rng(9);
        for (int t = 0; t < 10; ++t) {
            auto s = testing::random_spec(rng, 12, 3, 2, 0.6);
            double p = min_stable_power(s) + 0.5 * (saturation_power(s) - min_stable_power(s));
            auto sol = solve(build_lp(s, p));
            for (int k = 0; k <= s.K(); ++k)
                for (int w = 0; w + 1 < s.W(); ++w)
                    CHECK(sol.y_at(k, w) <= sol.y_at(k, w + 1) + 1e-9);
        }
    }

    TEST_CASE("LP text export")
    {
        auto lp = build_lp(testing::two_channel(4), 2.0);
        std::ostringstream os;
        write_lp_format(lp, os);
        std::string text = os.str();
        CHECK(text.find("Minimize") != std::string::npos);
        CHECK(text.find("Subject To") != std::string::npos);
        CHECK(text.find(" power:") != std::string::npos);
        CHECK(text.find(" bound_4_2:") != std::string::npos);
        CHECK(text.find("End") != std::string::npos);
    }
}
