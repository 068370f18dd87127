#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "routescape/error.hpp"
#include "routescape/landscape.hpp"

using namespace routescape;

namespace {

const LinkParams ring_link{1.0e6, 0.010};

// Textbook two-pass Pearson correlation in extended precision.
double pearson_two_pass(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<long double>(x.size());
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

std::vector<double> white_noise(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = 5.0 + uniform_unit(rng);
    }
    return v;
}

WalkTrace trace_of(std::vector<double> fitness, std::size_t walk = 0) {
    WalkTrace t;
    t.walk_index = walk;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        t.samples.push_back({i, RoutingConfiguration{{static_cast<std::uint32_t>(i % 2)}}, fitness[i]});
    }
    return t;
}

SimParams quick_sim() {
    SimParams p;
    p.duration_s = 2.0;
    p.warmup_s = 0.5;
    return p;
}

}  // namespace

TEST_CASE("fdc examples") {
    const std::vector<double> up{1, 2, 3}, down{3, 2, 1};
    CHECK(fdc(up, up) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fdc(down, up) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(fdc(std::vector<double>{1, 2, 1, 2}, std::vector<double>{5, 5, 5, 5}),
                    UndefinedStatisticError);
    CHECK_THROWS_AS(fdc(std::vector<double>{4, 4, 4}, up), UndefinedStatisticError);
    CHECK_THROWS_AS(fdc(std::vector<double>{1}, std::vector<double>{1}), UndefinedStatisticError);
    CHECK_THROWS_AS(fdc(up, std::vector<double>{1, 2}), UndefinedStatisticError);
}

TEST_CASE("fdc agrees with two-pass Pearson") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 400);
        std::vector<double> f(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = static_cast<double>(uniform_index(rng, 31));
            f[i] = 0.02 + 3.0 * uniform_unit(rng) + 0.1 * d[i] * uniform_unit(rng);
        }
        if (std::all_of(d.begin(), d.end(), [&](double x) { return x == d[0]; })) {
            continue;
        }
        const double expected = pearson_two_pass(f, d);
        REQUIRE(std::abs(fdc(f, d) - expected) <= 1e-12 * std::abs(expected));
    }
}

TEST_CASE("fdc is invariant under positive affine maps") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> f(50), d(50);
        for (std::size_t i = 0; i < f.size(); ++i) {
            d[i] = static_cast<double>(uniform_index(rng, 20));
            f[i] = uniform_unit(rng) + 0.05 * d[i];
        }
        const double a = 0.1 + 10.0 * uniform_unit(rng);
        const double b = -5.0 + 10.0 * uniform_unit(rng);
        std::vector<double> f2(f), d2(d);
        for (double& x : f2) x = a * x + b;
        for (double& x : d2) x = 3.0 * x + 7.0;
        const double base = fdc(f, d);
        CHECK(std::abs(fdc(f2, d) - base) <= 1e-12);
        CHECK(std::abs(fdc(f, d2) - base) <= 1e-12);
        CHECK(std::abs(base) <= 1.0);
    }
}

TEST_CASE("autocorrelation of white noise stays in the noise band") {
    Rng rng(2718);
    std::vector<std::vector<double>> seqs;
    for (int w = 0; w < 4; ++w) {
        seqs.push_back(white_noise(rng, 2500));
    }
    const AutocorrSeries s = autocorrelation(std::span<const std::vector<double>>(seqs), 50);
    CHECK(s.r[0] == 1.0);
    CHECK(s.samples == 10000);
    CHECK(s.pairs[1] == 4 * 2499);
    const double band = 3.0 / std::sqrt(10000.0);
    for (std::size_t lag = 1; lag <= 50; ++lag) {
        CHECK(std::abs(s.r[lag]) < band);
    }
    CHECK(classify_autocorr(s) == AutocorrShape::random);
}

TEST_CASE("autocorrelation closed form on blocks of two") {
    // f = (1,1,3,3,1,1): mean 5/3, variance 8/9.
    // Lag 1 centred products sum to 8/9, lag 2 to -32/9; both divided by 6 * 8/9.
    const std::vector<std::vector<double>> seqs{{1, 1, 3, 3, 1, 1}};
    const AutocorrSeries s = autocorrelation(std::span<const std::vector<double>>(seqs), 2);
    CHECK(s.r[0] == 1.0);
    CHECK(s.r[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(s.r[2] == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(s.pairs == std::vector<std::size_t>{6, 5, 4});
}

TEST_CASE("autocorrelation pools moments across walks") {
    // Two walks at different levels: pooled mean 2, pooled variance 1.
    const std::vector<std::vector<double>> seqs{{1, 1, 1}, {3, 3, 3}};
    const AutocorrSeries s = autocorrelation(std::span<const std::vector<double>>(seqs), 2);
    CHECK(s.r[1] == doctest::Approx(4.0 / 6.0));
    CHECK(s.r[2] == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("autocorrelation is bounded") {
    Rng rng(6);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::vector<double>> seqs(1 + uniform_index(rng, 3));
        for (auto& seq : seqs) {
            const std::size_t n = 6 + uniform_index(rng, 40);
            const double level = 1000.0 * uniform_unit(rng);
            double x = level;
            for (std::size_t i = 0; i < n; ++i) {
                // Mix of random-walk drift, plateaus and jumps.
                if (uniform_index(rng, 3) == 0) {
                    x += uniform_unit(rng) - 0.5;
                }
                if (uniform_index(rng, 20) == 0) {
                    x += 50.0;
                }
                seq.push_back(x);
            }
        }
        try {
            const auto s = autocorrelation(std::span<const std::vector<double>>(seqs), 5);
            CHECK(s.r[0] == 1.0);
            for (double r : s.r) {
                REQUIRE(std::abs(r) <= 1.0 + 1e-9);
            }
        } catch (const UndefinedStatisticError&) {
        }
    }
    // Large mean, tiny variance.
    const std::vector<std::vector<double>> edgy{{1000, 1000, 1001}};
    const auto s = autocorrelation(std::span<const std::vector<double>>(edgy), 1);
    CHECK(std::abs(s.r[1]) <= 1.0);
}

TEST_CASE("autocorrelation errors") {
    const std::vector<std::vector<double>> flat{{2, 2, 2, 2}};
    CHECK_THROWS_AS(autocorrelation(std::span<const std::vector<double>>(flat), 1),
                    UndefinedStatisticError);
    const std::vector<std::vector<double>> shortseq{{1, 2, 3}};
    CHECK_THROWS_AS(autocorrelation(std::span<const std::vector<double>>(shortseq), 3),
                    UndefinedStatisticError);
}

TEST_CASE("autocorrelation shape labels") {
    auto geometric = [](double base) {
        AutocorrSeries s;
        s.samples = 10000;
        for (int lag = 0; lag <= 200; ++lag) {
            s.r.push_back(std::pow(base, lag));
        }
        return s;
    };
    const AutocorrSeries slow = geometric(0.99);
    CHECK(decay_lag(slow, std::exp(-1.0)) == 100u);
    CHECK(classify_autocorr(slow) == AutocorrShape::slow_decay);
    const AutocorrSeries fast = geometric(0.5);
    CHECK(decay_lag(fast, std::exp(-1.0)) == 2u);
    CHECK(classify_autocorr(fast) == AutocorrShape::fast_decay);

    AutocorrSeries never = geometric(0.999);
    CHECK(!decay_lag(never, std::exp(-1.0)));
    CHECK(classify_autocorr(never) == AutocorrShape::slow_decay);

    ClassifyParams loose;
    loose.fast_fraction = 0.6;
    CHECK(classify_autocorr(slow, loose) == AutocorrShape::fast_decay);
    CHECK(to_string(AutocorrShape::slow_decay) == "slow-decay");
}

TEST_CASE("best sample and scatter") {
    const std::vector<WalkTrace> traces{trace_of({3.0, 1.0, 2.0}, 0), trace_of({1.0, 0.5, 0.5}, 1)};
    const BestSample best = find_best(traces);
    CHECK(best.walk == 1);
    CHECK(best.step == 1);
    CHECK(best.fitness == 0.5);

    const std::vector<WalkTrace> tie{trace_of({2.0, 1.0}, 0), trace_of({1.0, 1.0}, 1)};
    CHECK(find_best(tie).walk == 0);
    CHECK(find_best(tie).step == 1);

    const auto points = scatter_data(traces, best.config);
    CHECK(points.size() == 6);
    CHECK(points.front().distance == 0);
    CHECK(points.front().fitness == 0.5);
    CHECK(std::is_sorted(points.begin(), points.end(),
                         [](const ScatterPoint& a, const ScatterPoint& b) { return a.fitness < b.fitness; }));
}

TEST_CASE("scatter against each walk's own best") {
    const std::vector<WalkTrace> traces{trace_of({3.0, 1.0, 2.0}, 0), trace_of({1.0, 0.5, 0.5}, 1)};
    const auto per_walk = scatter_per_walk(traces);
    REQUIRE(per_walk.size() == 2);
    const std::vector<std::pair<std::size_t, double>> first{{0, 1.0}, {1, 2.0}, {1, 3.0}};
    const std::vector<std::pair<std::size_t, double>> second{{0, 0.5}, {1, 0.5}, {1, 1.0}};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(per_walk[0][i].distance == first[i].first);
        CHECK(per_walk[0][i].fitness == first[i].second);
        CHECK(per_walk[1][i].distance == second[i].first);
        CHECK(per_walk[1][i].fitness == second[i].second);
    }
}

TEST_CASE("analyze") {
    SUBCASE("single sample") {
        const std::vector<WalkTrace> one{trace_of({1.0})};
        CHECK_THROWS_AS(analyze(one, 1), UndefinedStatisticError);
    }
    SUBCASE("duplicated traces") {
        Rng rng(1);
        const WalkTrace t = trace_of(white_noise(rng, 40));
        const std::vector<WalkTrace> twice{t, t};
        const LandscapeStats stats = analyze(twice, 5);
        CHECK(stats.sample_count == 80);
        CHECK(stats.walk_count == 2);
        CHECK(std::abs(stats.fdc) <= 1.0);
        CHECK(stats.per_walk_autocorr.size() == 2);
        CHECK(stats.per_walk_autocorr[0].r == stats.per_walk_autocorr[1].r);
        CHECK(stats.best.walk == 0);
        CHECK(!stats.external_reference);
    }
    SUBCASE("external reference") {
        const std::vector<WalkTrace> traces{trace_of({3.0, 1.0, 2.0, 0.5})};
        const RoutingConfiguration ref{{0}};
        const LandscapeStats stats = analyze(traces, 2, ref);
        CHECK(stats.external_reference);
        CHECK(stats.reference == ref);
        CHECK(stats.best.fitness == 0.5);
        // Odd steps sit at distance 1 from the reference.
        CHECK(stats.scatter.front().distance == 1);
    }
}

TEST_CASE("random walk contract") {
    const Topology ring = build_cycle(6, ring_link);
    const RouteTable table = enumerate_routes(ring);
    const TrafficPattern hot = hotspot_pattern(ring, 0, 800, 0.01);
    const FitnessModel model{ring, table, hot, quick_sim()};
    WalkParams params;
    params.num_steps = 40;
    params.num_walks = 3;
    params.max_lag = 5;
    params.seed = 42;

    const WalkTrace a = random_walk(model, params, 1);
    CHECK(a.samples.size() == 40);
    CHECK(a.walk_index == 1);
    CHECK(a.seed == walk_seed(42, 1));
    for (std::size_t t = 0; t + 1 < a.samples.size(); ++t) {
        REQUIRE(hamming_distance(a.samples[t].config, a.samples[t + 1].config) == 1);
        CHECK(a.samples[t].step == t);
        CHECK(std::isfinite(a.samples[t].fitness));
        CHECK(a.samples[t].fitness > 0.0);
    }
    const WalkTrace b = random_walk(model, params, 1);
    for (std::size_t t = 0; t < a.samples.size(); ++t) {
        REQUIRE(a.samples[t].config == b.samples[t].config);
        REQUIRE(a.samples[t].fitness == b.samples[t].fitness);
    }
    CHECK(random_walk(model, params, 2).initial() != a.initial());

    const auto serial = run_walks(model, params, 1);
    const auto parallel = run_walks(model, params, 3);
    REQUIRE(serial.size() == 3);
    for (std::size_t w = 0; w < 3; ++w) {
        CHECK(serial[w].walk_index == w);
        for (std::size_t t = 0; t < 40; ++t) {
            REQUIRE(serial[w].samples[t].fitness == parallel[w].samples[t].fitness);
            REQUIRE(serial[w].samples[t].config == parallel[w].samples[t].config);
        }
    }
}

TEST_CASE("forced toggle walk alternates between two points") {
    // Line 0-1-2 plus a one-way shortcut 0->2. Only pair (0,2) is offered a
    // second route, and no traffic uses it.
    const Topology t(3, {{0, 1, 1e6, 0.01}, {1, 0, 1e6, 0.01}, {1, 2, 1e6, 0.01},
                         {2, 1, 1e6, 0.01}, {0, 2, 1e6, 0.01}});
    const RouteTable table(3, {{{0, 1}}, {{0, 1, 2}, {0, 2}}, {{1, 0}}, {{1, 2}}, {{2, 1, 0}}, {{2, 1}}});
    REQUIRE(table.viable_pairs().size() == 1);
    const TrafficPattern traffic{{{1, 0, 800, 0.01, 0.0}}, "test"};
    const FitnessModel model{t, table, traffic, quick_sim()};
    WalkParams params;
    params.num_steps = 12;
    params.max_lag = 3;
    const WalkTrace w = random_walk(model, params, 0);
    for (std::size_t s = 0; s < w.samples.size(); ++s) {
        CHECK(w.samples[s].config == w.samples[s % 2].config);
        CHECK(w.samples[s].fitness == w.samples[0].fitness);
    }
    CHECK(w.samples[0].config != w.samples[1].config);
    // Flat fitness: both estimators refuse.
    const std::vector<WalkTrace> traces{w};
    CHECK_THROWS_AS(analyze(traces, 3), UndefinedStatisticError);
}

TEST_CASE("walk errors carry the step") {
    const Topology ring = build_cycle(3, ring_link);
    const RouteTable table = enumerate_routes(ring);
    const TrafficPattern late{{{0, 1, 800, 0.01, 10.0}}, "late"};
    const FitnessModel model{ring, table, late, quick_sim()};
    WalkParams params;
    params.num_steps = 5;
    params.max_lag = 2;
    try {
        random_walk(model, params, 3);
        FAIL("expected a degenerate result");
    } catch (const DegenerateResultError& e) {
        CHECK(std::string(e.what()).find("walk 3 step 0") != std::string::npos);
    }
}

TEST_CASE("walk parameter validation") {
    WalkParams p;
    p.num_steps = 1;
    CHECK_THROWS_AS(validate_walk_params(p), ValidationError);
    p = {};
    p.num_walks = 0;
    CHECK_THROWS_AS(validate_walk_params(p), ValidationError);
    p = {};
    p.max_lag = p.num_steps;
    CHECK_THROWS_AS(validate_walk_params(p), ValidationError);
    p.max_lag = 0;
    CHECK_THROWS_AS(validate_walk_params(p), ValidationError);
}

TEST_CASE("enumeration best equals brute-force minimum on the three-node ring") {
    const Topology ring = build_cycle(3, ring_link);
    const RouteTable table = enumerate_routes(ring);
    const TrafficPattern adj = adjacent_pattern(ring, 800, 0.01);
    const FitnessModel model{ring, table, adj, quick_sim()};

    double brute_min = INFINITY;
    RoutingConfiguration brute_arg;
    for (const RoutingConfiguration& c : enumerate_all(table)) {
        const double f = simulate(ring, table, c, adj, model.sim).mean_delay_s;
        if (f < brute_min) {
            brute_min = f;
            brute_arg = c;
        }
    }
    const WalkTrace all = enumerate_landscape(model, default_enumeration_cap, 2);
    CHECK(all.samples.size() == 64);
    const std::vector<WalkTrace> traces{all};
    const LandscapeStats stats = analyze(traces, 10);
    CHECK(stats.best.fitness == brute_min);
    CHECK(stats.best.config == brute_arg);
    CHECK(stats.best.config == RoutingConfiguration{std::vector<std::uint32_t>(6, 0)});
    CHECK(stats.best.fitness == doctest::Approx(0.0164).epsilon(1e-9));
    for (const ScatterPoint& p : stats.scatter) {
        CHECK(p.fitness >= brute_min);
    }
    // Distances in the scatter are against the enumerated optimum.
    CHECK(stats.scatter.front().distance == 0);
    CHECK(stats.fdc > 0.0);
}
