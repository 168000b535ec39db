#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "mvcca/rng.hpp"

using mvcca::Rng;

TEST_CASE("same seed reproduces every draw type") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
        CHECK(a.uniform01() == b.uniform01());
        CHECK(a.normal() == b.normal());
        CHECK(a.bounded(97) == b.bounded(97));
    }
    std::vector<int> va{1, 2, 3, 4, 5, 6, 7, 8}, vb = va;
    a.shuffle(va);
    b.shuffle(vb);
    CHECK(va == vb);
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 50; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0,1)") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform(lo, hi) respects its bounds and hits both halves") {
    Rng rng(11);
    int low_half = 0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform(-3.0, 5.0);
        CHECK(u >= -3.0);
        CHECK(u < 5.0);
        if (u < 1.0) ++low_half;
    }
    CHECK(low_half > 4500);
    CHECK(low_half < 5500);
}

TEST_CASE("normal draws have roughly standard moments") {
    Rng rng(42);
    const int n = 200000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.normal();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("bounded(n) covers [0, n) roughly uniformly") {
    Rng rng(5);
    const std::uint64_t n = 10;
    std::vector<int> counts(n, 0);
    for (int i = 0; i < 50000; ++i) {
        const std::uint64_t v = rng.bounded(n);
        REQUIRE(v < n);
        ++counts[static_cast<std::size_t>(v)];
    }
    for (int c : counts) {
        CHECK(c > 4500);
        CHECK(c < 5500);
    }
}

TEST_CASE("shuffle produces a permutation") {
    Rng rng(9);
    std::vector<int> v(100);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i;
    std::vector<int> orig = v;
    rng.shuffle(v);
    CHECK(v != orig);   // 1/100! chance of a false failure
    std::sort(v.begin(), v.end());
    CHECK(v == orig);
}

TEST_CASE("derive_seed is deterministic and stage-sensitive") {
    const std::uint64_t a = mvcca::derive_seed(42, "dataset");
    CHECK(a == mvcca::derive_seed(42, "dataset"));
    CHECK(a != mvcca::derive_seed(42, "svm"));
    CHECK(a != mvcca::derive_seed(43, "dataset"));

    // Distinct stage names should give distinct sub-seeds in practice.
    std::set<std::uint64_t> seeds;
    for (int i = 0; i < 1000; ++i)
        seeds.insert(mvcca::derive_seed(42, "stage-" + std::to_string(i)));
    CHECK(seeds.size() == 1000);
}
