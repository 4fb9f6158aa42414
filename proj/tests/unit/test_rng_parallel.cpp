#include <atomic>
#include <set>
#include <stdexcept>

#include "doctest.h"

#include <dendro/parallel.hpp>
#include <dendro/rng.hpp>

using namespace dendro;

TEST_SUITE_BEGIN("rng and parallel");

TEST_CASE("split streams depend only on key and label") {
    const Rng root{42};
    Rng a = root.split("height", 3);
    Rng consumed = root;
    consumed.uniform();
    Rng b = consumed.split("height", 3);
    CHECK(a.key() == b.key());
    CHECK(a.uniform() == b.uniform());
    CHECK(root.split("height", 3).key() != root.split("height", 4).key());
    CHECK(root.split("height", 3).key() != root.split("fiber", 3).key());
    CHECK(Rng{1}.split("x").key() != Rng{2}.split("x").key());
}

TEST_CASE("fixed reference values") {
    // pins the streams; a change here breaks reproducibility of stored results
    Rng rng{42};
    CHECK(rng.uniform() == 0.13967200376411748);
    CHECK(rng.normal() == 2.2658597857238427);
    CHECK(rng.exponential() == 0.79636845561423864);
    CHECK(rng.below(1000) == 248);
    CHECK(Rng{42}.split("height", 3).key() == 1594087191925060949ULL);
    CHECK(mix64(1) == 10451216379200822465ULL);
}

TEST_CASE("draw ranges") {
    Rng rng{7};
    for (int t = 0; t < 10000; ++t) {
        const double u = rng.uniform(2.0, 3.0);
        REQUIRE(u >= 2.0);
        REQUIRE(u < 3.0);
        REQUIRE(rng.below(5) < 5);
        REQUIRE(rng.exponential() >= 0.0);
    }
    std::set<std::uint64_t> seen;
    for (int t = 0; t < 1000; ++t) {
        seen.insert(rng.below(3));
    }
    CHECK(seen.size() == 3);
}

TEST_CASE("parallel_for visits every index once") {
    for (const std::size_t threads : {1u, 2u, 5u}) {
        set_thread_count(threads);
        CHECK(thread_count() == threads);
        std::vector<std::atomic<int>> visits(1000);
        parallel_for(visits.size(), [&](std::size_t i) { ++visits[i]; });
        for (const auto& v : visits) {
            REQUIRE(v.load() == 1);
        }
    }
    set_thread_count(std::nullopt);
    CHECK(thread_count() >= 1);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
    set_thread_count(4);
    try {
        parallel_for(100, [](std::size_t i) {
            if (i == 17 || i == 63) {
                throw std::runtime_error{std::to_string(i)};
            }
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string{e.what()} == "17");
    }
    set_thread_count(std::nullopt);
}

TEST_CASE("nested parallel_for runs inline") {
    set_thread_count(3);
    std::vector<std::atomic<int>> visits(50);
    parallel_for(5, [&](std::size_t i) { parallel_for(10, [&](std::size_t j) { ++visits[i * 10 + j]; }); });
    for (const auto& v : visits) {
        CHECK(v.load() == 1);
    }
    set_thread_count(std::nullopt);
}

TEST_SUITE_END();
