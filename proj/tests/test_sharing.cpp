#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "ctqt/rng.hpp"
#include "ctqt/sharing.hpp"

using namespace ctqt;

namespace {

SecretVector secret(std::initializer_list<std::int64_t> vals, PrimeModulus p) {
    SecretVector v;
    for (auto x : vals) v.emplace_back(x, p);
    return v;
}

std::vector<std::int64_t> values(const ShareSet& s) {
    std::vector<std::int64_t> out;
    for (const Share& sh : s) out.push_back(sh.value.value());
    return out;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(ThresholdConfig::standard(2, 3));
    CHECK_NOTHROW(ThresholdConfig::standard(1, 1));
    CHECK_THROWS_AS(ThresholdConfig::standard(4, 3), Error);
    CHECK_THROWS_AS(ThresholdConfig::standard(0, 3), Error);
    // p must cover the m distinct evaluation points
    CHECK_THROWS_AS(ThresholdConfig::standard(2, 5, PrimeModulus(3)), Error);
}

TEST_CASE("generate_shares") {
    ThresholdConfig cfg3 = ThresholdConfig::standard(2, 3, PrimeModulus(3));
    CHECK(values(generate_shares(secret({2, 1}, cfg3.p), cfg3)) ==
          std::vector<std::int64_t>{2, 0, 1});
    CHECK(values(generate_shares(secret({0, 0}, cfg3.p), cfg3)) ==
          std::vector<std::int64_t>{0, 0, 0});

    ThresholdConfig cfg5 = ThresholdConfig::standard(2, 3, PrimeModulus(5));
    CHECK(values(generate_shares(secret({1, 1}, cfg5.p), cfg5)) ==
          std::vector<std::int64_t>{1, 2, 3});

    CHECK_THROWS_AS(generate_shares(secret({1}, cfg3.p), cfg3), DimensionMismatch);
}

TEST_CASE("reconstruct_keys") {
    ThresholdConfig cfg = ThresholdConfig::standard(2, 3, PrimeModulus(3));
    ShareSet full = generate_shares(secret({2, 1}, cfg.p), cfg);

    ShareSet partial{{1, FieldElement(2, cfg.p)}, {3, FieldElement(1, cfg.p)}};
    CHECK(reconstruct_keys(partial, cfg) == full);
    CHECK(reconstruct_keys(full, cfg) == full);

    ShareSet one{{1, FieldElement(2, cfg.p)}};
    CHECK_THROWS_AS(reconstruct_keys(one, cfg), InsufficientShares);

    // a wrong key is detectable only with more than k shares
    ShareSet lied = full;
    lied[1].value = lied[1].value + FieldElement(1, cfg.p);
    CHECK_THROWS_AS(reconstruct_keys(lied, cfg), InconsistentShares);
}

TEST_CASE("reconstruct after generate on every k-subset") {
    RngStream rng(99);
    for (auto [k, m] : std::vector<std::pair<int, int>>{{2, 3}, {3, 5}, {2, 4}, {4, 4}}) {
        ThresholdConfig cfg = ThresholdConfig::standard(k, m);
        std::int64_t p = cfg.p.value();
        SecretVector x;
        for (int i = 0; i < k; ++i) x.emplace_back(rng.uniform_int(p), cfg.p);
        ShareSet full = generate_shares(x, cfg);

        std::vector<int> pick(static_cast<std::size_t>(m), 0);
        std::fill(pick.begin(), pick.begin() + k, 1);
        std::sort(pick.begin(), pick.end());
        do {
            ShareSet partial;
            for (int i = 0; i < m; ++i)
                if (pick[static_cast<std::size_t>(i)]) partial.push_back(full[static_cast<std::size_t>(i)]);
            CHECK(reconstruct_keys(partial, cfg) == full);
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
}

TEST_CASE("consistent_secrets cardinalities") {
    ThresholdConfig cfg = ThresholdConfig::standard(2, 3, PrimeModulus(3));
    ShareSet full = generate_shares(secret({2, 1}, cfg.p), cfg);

    ShareSet two{full[0], full[2]};
    CHECK(consistent_secrets(two, cfg).size() == 1);
    CHECK(consistent_secrets({full[1]}, cfg).size() == 3);
    CHECK(consistent_secrets({}, cfg).size() == 9);
}

TEST_CASE("perfect secrecy of (k-1)-subsets, exhaustive") {
    for (std::int64_t p : {3, 5, 7}) {
        for (auto [k, m] : std::vector<std::pair<int, int>>{{2, 3}, {3, 5}}) {
            if (p < m) continue;
            ThresholdConfig cfg = ThresholdConfig::standard(k, m, PrimeModulus(p));
            std::vector<int> pick(static_cast<std::size_t>(m), 0);
            std::fill(pick.begin(), pick.begin() + (k - 1), 1);
            std::sort(pick.begin(), pick.end());
            do {
                // every assignment of values to the held shares
                std::vector<int> held;
                for (int i = 0; i < m; ++i)
                    if (pick[static_cast<std::size_t>(i)]) held.push_back(i + 1);
                std::vector<std::int64_t> vals(held.size(), 0);
                while (true) {
                    ShareSet partial;
                    for (std::size_t i = 0; i < held.size(); ++i)
                        partial.push_back({held[i], FieldElement(vals[i], cfg.p)});
                    auto secrets = consistent_secrets(partial, cfg);
                    REQUIRE(secrets.size() == static_cast<std::size_t>(p));
                    for (int other = 1; other <= m; ++other) {
                        if (std::count(held.begin(), held.end(), other)) continue;
                        std::vector<int> count(static_cast<std::size_t>(p), 0);
                        for (const SecretVector& x : secrets) {
                            ShareSet sh = generate_shares(x, cfg);
                            ++count[static_cast<std::size_t>(
                                sh[static_cast<std::size_t>(other - 1)].value.value())];
                        }
                        for (int c : count) CHECK(c == 1);
                    }
                    std::size_t pos = vals.size();
                    while (pos > 0 && ++vals[pos - 1] == p) vals[--pos] = 0;
                    if (pos == 0 && (vals.empty() || vals[0] == 0)) break;
                }
            } while (std::next_permutation(pick.begin(), pick.end()));
        }
    }
}

TEST_CASE("codeword_set") {
    ThresholdConfig cfg = ThresholdConfig::standard(2, 3, PrimeModulus(3));
    auto words = codeword_set(cfg);
    CHECK(words.size() == 9);
    std::set<std::vector<std::int64_t>> unique(words.begin(), words.end());
    CHECK(unique.size() == 9);

    PrimeModulus p2(2);
    ThresholdConfig tiny(1, 1, p2, FieldMatrix::from_rows({{1}}, p2),
                         FieldVector{FieldElement(0, p2)});
    auto bits = codeword_set(tiny);
    CHECK(bits == std::vector<std::vector<std::int64_t>>{{0}, {1}});
}

TEST_CASE("condition (ii): fixing any k digits selects exactly one codeword") {
    for (auto [k, m, p] : std::vector<std::tuple<int, int, std::int64_t>>{
             {2, 3, 3}, {3, 5, 5}}) {
        ThresholdConfig cfg = ThresholdConfig::standard(k, m, PrimeModulus(p));
        auto words = codeword_set(cfg);
        std::vector<int> pick(static_cast<std::size_t>(m), 0);
        std::fill(pick.begin(), pick.begin() + k, 1);
        std::sort(pick.begin(), pick.end());
        do {
            for (const auto& w : words) {
                int matches = 0;
                for (const auto& other : words) {
                    bool same = true;
                    for (int i = 0; i < m; ++i)
                        if (pick[static_cast<std::size_t>(i)] &&
                            other[static_cast<std::size_t>(i)] != w[static_cast<std::size_t>(i)])
                            same = false;
                    if (same) ++matches;
                }
                CHECK(matches == 1);
            }
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
}

TEST_CASE("enumeration cap") {
    // p^k = 11^6 > 10^6
    ThresholdConfig big = ThresholdConfig::standard(6, 6, PrimeModulus(11));
    CHECK_THROWS_AS(consistent_secrets({}, big), EnumerationTooLarge);
    CHECK_THROWS_AS(codeword_set(big), EnumerationTooLarge);
}
