#include <doctest.h>

#include <numeric>
#include <set>
#include <vector>

#include "cropml/rng.hpp"

using namespace cropml;

TEST_CASE("splitmix64 is deterministic and advances state") {
    std::uint64_t s1 = 42;
    std::uint64_t s2 = 42;
    for (int i = 0; i < 8; ++i)
        CHECK(rng::splitmix64_next(s1) == rng::splitmix64_next(s2));
    CHECK(s1 != 42);
}

TEST_CASE("xoshiro streams are reproducible per seed") {
    rng::Xoshiro256ss a(7);
    rng::Xoshiro256ss b(7);
    rng::Xoshiro256ss c(8);
    bool all_equal = true;
    bool any_diff_from_c = false;
    for (int i = 0; i < 64; ++i) {
        std::uint64_t va = a.next();
        all_equal = all_equal && va == b.next();
        any_diff_from_c = any_diff_from_c || va != c.next();
    }
    CHECK(all_equal);
    CHECK(any_diff_from_c);
}

TEST_CASE("next_double stays in [0,1)") {
    rng::Xoshiro256ss gen(123);
    for (int i = 0; i < 1000; ++i) {
        double v = gen.next_double();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("child seeds separate purposes and indices") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i) {
        seen.insert(rng::child_seed(42, "boot", i));
        seen.insert(rng::child_seed(42, "feat", i));
    }
    CHECK(seen.size() == 200);
    CHECK(rng::child_seed(1, "boot", 0) != rng::child_seed(2, "boot", 0));
}

TEST_CASE("fisher_yates yields a permutation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<int> items(57);
        std::iota(items.begin(), items.end(), 0);
        rng::Xoshiro256ss gen(seed);
        rng::fisher_yates(items, gen);
        std::set<int> unique(items.begin(), items.end());
        CHECK(unique.size() == items.size());
        CHECK(*unique.begin() == 0);
        CHECK(*unique.rbegin() == 56);
    }
}
