#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "oracles.hpp"

#include <dendro/errors.hpp>
#include <dendro/mh_pruning.hpp>
#include <dendro/samplers.hpp>

using namespace dendro;

TEST_SUITE_BEGIN("mh pruning");

TEST_CASE("theta membership") {
    Rng rng{6};
    for (int t = 0; t < 30; ++t) {
        CHECK(theta_membership(oracle::random_ultrametric(5, rng).values()));
    }
    // MST edge above 1
    CHECK_FALSE(theta_membership(Dissimilarity{3, {1.5, 2.0, 2.0}}));
    // not a metric
    CHECK_FALSE(theta_membership(Dissimilarity{3, {0.1, 0.5, 0.1}}));
    for (int t = 0; t < 200; ++t) {
        const auto d = oracle::random_dissimilarity(5, rng, 0.05, 1.6);
        const bool direct = !find_triangle_violation(5, d.values()) && slhc(d).values().max_value() <= 1.0;
        CHECK(theta_membership(d) == direct);
    }
}

TEST_CASE("MH configuration") {
    MHConfig cfg;
    CHECK(cfg.transitions() == 10000);
    cfg.thinning = 0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = MHConfig{};
    cfg.proposal_sigma = -1.0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
}

TEST_CASE("transitions stay in Theta") {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    Rng rng{8};
    const auto u = oracle::random_ultrametric(5, rng);
    const auto x = sample_measurement(u.values(), model, rng);
    MetropolisChain chain{x, initial_state(x), model, 0.1, 10000};
    for (int k = 0; k < 2000; ++k) {
        chain.step(rng);
        REQUIRE(theta_membership(5, chain.state()));
        REQUIRE(chain.log_density() == doctest::Approx(model.log_density(x.values(), chain.state())));
    }
    CHECK(chain.steps() == 2000);
    CHECK(chain.accepted() > 0);
    CHECK(chain.accepted() < 2000);
}

TEST_CASE("single transition") {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    const Dissimilarity x{3, {0.5, 0.6, 0.6}};
    const auto start = validate_metric(Dissimilarity{3, {0.5, 0.6, 0.6}});
    MHConfig cfg;
    SUBCASE("tiny sigma leaves the state where it is") {
        cfg.proposal_sigma = 1e-12;
        Rng rng{1};
        const auto next = mh_transition(start, x, model, cfg, rng);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(next.values().values()[k] == doctest::Approx(start.values().values()[k]).epsilon(1e-9));
        }
    }
    SUBCASE("start outside Theta") {
        Rng rng{1};
        CHECK_THROWS_AS(mh_transition(validate_metric(Dissimilarity{3, {1.5, 1.6, 1.6}}), x, model, cfg, rng),
                        DomainError);
    }
}

TEST_CASE("proposal stuck") {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    // a needle-thin metric: any independent perturbation breaks some triangle
    const Dissimilarity x{3, {0.5, 1e-6, 0.5}};
    const auto start = validate_metric(x);
    MHConfig cfg;
    cfg.proposal_sigma = 0.3;
    cfg.max_proposal_attempts = 3;
    Rng rng{2};
    bool stuck = false;
    try {
        for (int k = 0; k < 1000; ++k) {
            mh_transition(start, x, model, cfg, rng);
        }
    } catch (const ProposalStuck& e) {
        stuck = true;
        CHECK(e.attempts == 3);
    }
    CHECK(stuck);
}

TEST_CASE("initial state") {
    SUBCASE("x in Theta is used as is") {
        const Dissimilarity x{3, {0.5, 0.6, 0.7}};
        CHECK(initial_state(x).values() == x);
    }
    SUBCASE("otherwise the single-linkage ultrametric, shrunk into Theta") {
        const Dissimilarity x{3, {2.0, 5.0, 4.0}};
        const auto theta = initial_state(x);
        CHECK(theta_membership(theta.values()));
        CHECK(theta.values().max_value() == doctest::Approx(1.0 - 1e-6));
        CHECK(decompose(validate_ultrametric(theta.values())).structure == decompose(slhc(x)).structure);
    }
    SUBCASE("a non-metric below scale keeps its slhc values") {
        const Dissimilarity x{3, {0.1, 0.5, 0.1}};
        CHECK(initial_state(x).values() == slhc(x).values());
    }
}

TEST_CASE("tally and prune") {
    const StructureCatalog catalog{4};
    StructureTally tally;
    tally.add(catalog[3], 5);
    tally.add(catalog[1], 5);
    tally.add(catalog[7], 9);
    tally.add(catalog[2]);
    CHECK(tally.total() == 20);
    CHECK(tally.count(catalog[3]) == 5);
    CHECK(tally.count(catalog[0]) == 0);

    const auto pruned = prune(tally, 3);
    REQUIRE(pruned.size() == 3);
    CHECK(pruned[0] == catalog[7]);
    // equal counts fall back to canonical order
    CHECK(pruned[1] == catalog[1]);
    CHECK(pruned[2] == catalog[3]);
    CHECK(prune(tally, 100).size() == 4);

    StructureTally single;
    single.add(catalog[0], 3);
    CHECK(prune(single, 20) == std::vector<Structure>{catalog[0]});

    StructureTally other;
    other.add(catalog[2], 4);
    tally.merge(other);
    CHECK(tally.total() == 24);
    CHECK(tally.count(catalog[2]) == 5);
}

TEST_CASE("chain length and record count") {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    Rng rng{4};
    const auto u = oracle::random_ultrametric(5, rng);
    const auto x = sample_measurement(u.values(), model, rng);
    MHConfig cfg;
    cfg.burn_in = 100;
    cfg.thinning = 2;
    cfg.n_theta = 300;
    ChainStats stats;
    const auto tally = mh_sample(x, initial_state(x), model, cfg, rng, &stats);
    CHECK(tally.total() == 300);
    CHECK(stats.transitions == 700);
    std::size_t sum = 0;
    for (const auto& [s, c] : tally.counts()) {
        sum += c;
    }
    CHECK(sum == 300);

    SUBCASE("paper settings use ten thousand transitions") {
        CHECK(MHConfig{}.transitions() == 10000);
    }
}

TEST_CASE("low noise concentrates on the true structure") {
    const LogNormalNoise model{NoiseSpec::from_std(0.01)};
    const StructureCatalog catalog{4};
    const auto u = compose(catalog[11], std::vector<double>{0.2, 0.5, 0.8});
    Rng rng{5};
    const auto x = sample_measurement(u.values(), model, rng);
    MHConfig cfg;
    cfg.n_theta = 1000;
    const auto tally = mh_sample(x, initial_state(x), model, cfg, rng);
    CHECK(static_cast<double>(tally.count(catalog[11])) >= 0.95 * tally.total());
}

namespace {

/// Total variation between a long chain's histogram on (0, 1] and density/Z.
double chain_total_variation(double x_value, double std_dev, const std::function<double(double)>& density) {
    const LogNormalNoise model{NoiseSpec::from_std(std_dev)};
    const Dissimilarity x{2, {x_value}};
    MetropolisChain chain{x, validate_metric(x), model, std_dev, 10000};
    Rng rng{10};
    const int bins = 20;
    std::vector<double> hist(bins, 0.0);
    const int draws = 400000;
    for (int k = 0; k < 2000; ++k) {
        chain.step(rng);
    }
    for (int k = 0; k < draws; ++k) {
        chain.step(rng);
        hist[std::min(bins - 1, static_cast<int>(chain.state()[0] * bins))] += 1.0 / draws;
    }
    const double z = oracle::simpson(density, 0.0, 1.0, 4000);
    double tv = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double lo = static_cast<double>(b) / bins;
        tv += std::abs(oracle::simpson(density, lo, lo + 1.0 / bins, 200) / z - hist[b]);
    }
    return 0.5 * tv;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("stationary density on two points") {
    // Theta = (0, 1]
    SUBCASE("away from the boundary the chain samples p(x|theta)") {
        const auto target = [](double t) { return t <= 0.0 ? 0.0 : oracle::lognormal_pdf(0.5, t, 0.01); };
        CHECK(chain_total_variation(0.5, 0.1, target) < 0.05);
    }
    SUBCASE("redrawing outside proposals tilts the law by the inside probability") {
        // stationary law is p(x|theta) * P(proposal from theta lands in Theta)
        const double s = 0.3;
        const auto target = [s](double t) {
            if (t <= 0.0) {
                return 0.0;
            }
            return oracle::lognormal_pdf(0.6, t, s * s) * (normal_cdf((1.0 - t) / s) - normal_cdf(-t / s));
        };
        CHECK(chain_total_variation(0.6, s, target) < 0.05);
    }
}

TEST_CASE("independent seeds agree on the leading structures") {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    const StructureCatalog catalog{5};
    const auto u = compose(catalog[60], std::vector<double>{0.15, 0.35, 0.6, 0.9});
    Rng truth{7};
    const auto x = sample_measurement(u.values(), model, truth);
    Rng a{100};
    Rng b{200};
    const auto top_a = prune(mh_sample(x, initial_state(x), model, MHConfig{}, a), 5);
    const auto top_b = prune(mh_sample(x, initial_state(x), model, MHConfig{}, b), 5);
    std::size_t shared = 0;
    for (const auto& s : top_a) {
        shared += std::count(top_b.begin(), top_b.end(), s);
    }
    CHECK(shared >= 3);
}

TEST_CASE("starting point has little influence") {
    const LogNormalNoise model{NoiseSpec::from_std(0.1)};
    const StructureCatalog catalog{5};
    Rng rng{12};
    int agree = 0;
    const int trials = 50;
    MHConfig cfg;
    cfg.n_theta = 1000;
    for (int t = 0; t < trials; ++t) {
        const auto u = compose(catalog[rng.below(catalog.size())], sample_height(5, rng));
        Rng noise = rng.split("noise", t);
        const auto x = sample_measurement(u.values(), model, noise);
        const auto from_x = initial_state(x);
        const auto ultra = slhc(x);
        const double scale = std::max(1.0, ultra.values().max_value() / (1.0 - 1e-6));
        const auto from_u = Metric::assume_valid(ultra.values().scaled(1.0 / scale));
        Rng ca = rng.split("a", t);
        Rng cb = rng.split("b", t);
        try {
            const auto ta = prune(mh_sample(x, from_x, model, cfg, ca), 1);
            const auto tb = prune(mh_sample(x, from_u, model, cfg, cb), 1);
            agree += ta == tb;
        } catch (const ProposalStuck&) {
        }
    }
    CHECK(agree >= 0.8 * trials);
}

TEST_SUITE_END();
