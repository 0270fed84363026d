#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "permfwer/random.hpp"

using namespace permfwer;

TEST_SUITE("random") {

TEST_CASE("streams are reproducible and keyed by path") {
    RandomStream a(42, {1, 7}), b(42, {1, 7}), c(42, {1, 8}), d(43, {1, 7});
    std::array<std::uint64_t, 8> va{}, vb{}, vc{}, vd{};
    for (int i = 0; i < 8; ++i) {
        va[i] = a.next_u64();
        vb[i] = b.next_u64();
        vc[i] = c.next_u64();
        vd[i] = d.next_u64();
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
}

TEST_CASE("derive_seed gives distinct children") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 10000; ++k) seen.insert(derive_seed(1, k));
    CHECK(seen.size() == 10000);
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("uniform draws have the right moments and range") {
    RandomStream rng(5, {9});
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double p = rng.uniform_pos();
        REQUIRE(p > 0.0);
        REQUIRE(p <= 1.0);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sq / n - mean * mean - 1.0 / 12.0) < 2e-3);
}

TEST_CASE("normal draws match N(0,1) moments") {
    RandomStream rng(11, {3});
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("bounded integers are uniform (chi-square)") {
    RandomStream rng(3, {4});
    const std::uint64_t k = 7;
    const int n = 70000;
    std::array<int, 7> counts{};
    for (int i = 0; i < n; ++i) {
        const auto v = rng.below(k);
        REQUIRE(v < k);
        ++counts[v];
    }
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi2 < 22.46);  // chi-square(6) 0.999 quantile
}

TEST_CASE("permutations are valid and uniform over S_3") {
    RandomStream rng(8, {2});
    std::array<int, 6> counts{};
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        auto p = random_permutation(3, rng);
        std::vector<int> sorted = p;
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(sorted == std::vector<int>{0, 1, 2});
        const int rank = p[0] * 2 + (p[1] > p[2] ? 1 : 0);
        ++counts[static_cast<std::size_t>(rank)];
    }
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
    CHECK(chi2 < 20.52);  // chi-square(5) 0.999 quantile
}

}
