#include <algorithm>
#include <numeric>
#include <sstream>

#include "doctest.h"

#include <dendro/errors.hpp>
#include <dendro/experiments.hpp>
#include <dendro/parallel.hpp>

using namespace dendro;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.n = 4;
    spec.n_measurements = 6;
    spec.n_heights = 2;
    spec.per_height = 2;
    spec.mh.burn_in = 100;
    spec.mh.n_theta = 200;
    spec.mh.n_hypotheses = 4;
    spec.likelihood.n_omega = 10;
    spec.likelihood.fiber_budget.min_total_accepted = 50;
    spec.seed = 3;
    return spec;
}

std::string frequency_csv(const ExperimentSpec& spec) {
    const auto study = run_frequency_study(spec);
    std::ostringstream out;
    write_histogram_csv(out, study.histogram);
    write_ranks_csv(out, study.ranks);
    return out.str();
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("frequency bins") {
    CHECK(frequency_bin(0, 3000) == 0);
    CHECK(frequency_bin(1, 3000) == 0);
    CHECK(frequency_bin(150, 3000) == 0);   // exactly 0.05 stays in the lowest bin
    CHECK(frequency_bin(151, 3000) == 1);
    CHECK(frequency_bin(3000, 3000) == 19);
    CHECK(frequency_bin(2850, 3000) == 18);
    CHECK(frequency_bin(2851, 3000) == 19);
}

TEST_CASE("ground truth") {
    const StructureCatalog catalog{5};
    Rng rng{1};
    for (int t = 0; t < 20; ++t) {
        Rng stream = rng.split("t", t);
        const auto truth = generate_ground_truth(catalog, stream);
        const auto u = compose(truth.structure, truth.heights);
        const auto back = slhc(truth.theta.values());
        for (std::size_t k = 0; k < u.values().pairs(); ++k) {
            CHECK(back.values().values()[k] == doctest::Approx(u.values().values()[k]).epsilon(1e-9));
        }
        CHECK(decompose(back).structure == truth.structure);
        CHECK(back.values().max_value() <= 1.0);
    }
}

TEST_CASE("tally summary") {
    const StructureCatalog catalog{4};
    StructureTally tally;
    tally.add(catalog[2], 70);
    tally.add(catalog[5], 20);
    tally.add(catalog[9], 10);
    const auto summary = summarize_tally(tally, catalog, catalog[5]);
    CHECK(std::accumulate(summary.bins.begin(), summary.bins.end(), std::size_t{0}) == catalog.size());
    CHECK(summary.bins[0] == 15);  // unseen structures
    CHECK(summary.bins[1] == 1);   // 0.1
    CHECK(summary.bins[3] == 1);   // 0.2
    CHECK(summary.bins[13] == 1);  // 0.7
    CHECK(summary.true_rank == 2);
    CHECK_FALSE(summarize_tally(tally, catalog, catalog[0]).true_rank);
}

TEST_CASE("frequency study invariants") {
    const auto spec = small_spec();
    const auto study = run_frequency_study(spec);
    const double total = std::accumulate(study.histogram.mean_counts.begin(), study.histogram.mean_counts.end(), 0.0);
    CHECK(total == doctest::Approx(18.0));
    const std::size_t ranked = std::accumulate(study.ranks.rank_counts.begin(), study.ranks.rank_counts.end(),
                                               std::size_t{0});
    CHECK(ranked + study.ranks.unranked == spec.n_measurements);
    CHECK(study.histogram.edges.front() == 0.0);
    CHECK(study.histogram.edges.back() == 1.0);
}

TEST_CASE("frequency study is reproducible and thread independent") {
    const auto spec = small_spec();
    set_thread_count(1);
    const auto serial = frequency_csv(spec);
    set_thread_count(4);
    const auto parallel = frequency_csv(spec);
    set_thread_count(std::nullopt);
    CHECK(serial == parallel);
    CHECK(serial == frequency_csv(spec));
}

TEST_CASE("comparison study") {
    auto spec = small_spec();
    spec.structure_index = 3;
    const std::vector<double> levels{0.01, 0.2};
    const auto rows = run_comparison_study(spec, levels);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].noise_std == 0.01);
    // nearly noiseless: both estimators succeed
    CHECK(rows[0].mle_rate == 1.0);
    CHECK(rows[0].slhc_rate == 1.0);
    std::ostringstream out;
    write_comparison_csv(out, rows);
    const std::string csv = out.str();
    CHECK(csv.rfind("noise_std,mle_rate,slhc_rate\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    spec.structure_index = 18;
    CHECK_THROWS_AS(run_comparison_study(spec, levels), DomainError);
}

TEST_CASE("spec validation") {
    auto spec = small_spec();
    spec.n_measurements = 0;
    CHECK_THROWS_AS(validate(spec), DomainError);
    spec = small_spec();
    spec.noise_std = 0.0;
    CHECK_THROWS_AS(validate(spec), DomainError);
}

TEST_SUITE_END();
