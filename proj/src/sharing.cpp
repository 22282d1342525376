#include "ctqt/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ctqt {

ThresholdConfig::ThresholdConfig(int k_, int m_, PrimeModulus p_, FieldMatrix matrix_,
                                 FieldVector points_)
    : k(k_), m(m_), p(p_), matrix(std::move(matrix_)), points(std::move(points_)) {
    if (k < 1 || k > m) throw ValidationError("require 1 <= k <= m");
    if (p.value() < m) throw ValidationError("require p >= m");
    if (matrix.rows() != m || matrix.cols() != k)
        throw ValidationError("share matrix must be m x k");
    if (matrix.modulus() != p) throw ModulusMismatch("share matrix modulus differs");
    if (!is_threshold_matrix(matrix, k))
        throw ValidationError("share matrix violates the row-striking condition");
}

ThresholdConfig ThresholdConfig::standard(int k, int m) {
    return standard(k, m, smallest_valid_prime(m));
}

ThresholdConfig ThresholdConfig::standard(int k, int m, PrimeModulus p) {
    FieldVector points;
    points.reserve(m);
    for (int s = 1; s <= m; ++s) points.emplace_back(s - 1, p);
    return ThresholdConfig(k, m, p, vandermonde(m, k, points), points);
}

ShareSet generate_shares(const SecretVector& x, const ThresholdConfig& cfg) {
    if (static_cast<int>(x.size()) != cfg.k)
        throw DimensionMismatch("secret vector must have length k");
    FieldVector c = cfg.matrix.mat_vec_mul(x);
    ShareSet shares;
    shares.reserve(cfg.m);
    for (int s = 1; s <= cfg.m; ++s) shares.push_back({s, c[s - 1]});
    return shares;
}

namespace {

void check_indices(const ShareSet& partial, const ThresholdConfig& cfg) {
    std::set<int> seen;
    for (const Share& sh : partial) {
        if (sh.index < 1 || sh.index > cfg.m)
            throw ValidationError("share index out of range");
        if (!seen.insert(sh.index).second)
            throw ValidationError("duplicate share index");
    }
}

}  // namespace

ShareSet reconstruct_keys(const ShareSet& partial, const ThresholdConfig& cfg) {
    check_indices(partial, cfg);
    if (static_cast<int>(partial.size()) < cfg.k)
        throw InsufficientShares("fewer than k shares supplied");
    std::vector<int> rows;
    FieldVector b;
    for (const Share& sh : partial) {
        rows.push_back(sh.index - 1);
        b.push_back(sh.value);
    }
    SecretVector x;
    try {
        x = cfg.matrix.select_rows(rows).solve_unique(b);
    } catch (const Inconsistent&) {
        throw InconsistentShares("supplied shares lie on no codeword");
    }
    return generate_shares(x, cfg);
}

namespace {

std::int64_t checked_pow(std::int64_t p, int k) {
    std::int64_t total = 1;
    for (int i = 0; i < k; ++i) {
        total *= p;
        if (total > 1000000) throw EnumerationTooLarge("p^k exceeds the 10^6 cap");
    }
    return total;
}

}  // namespace

std::vector<SecretVector> consistent_secrets(const ShareSet& partial,
                                             const ThresholdConfig& cfg) {
    check_indices(partial, cfg);
    std::int64_t p = cfg.p.value();
    checked_pow(p, cfg.k);
    std::vector<SecretVector> out;
    std::vector<std::int64_t> digits(cfg.k, 0);
    for (;;) {
        SecretVector x;
        x.reserve(cfg.k);
        for (std::int64_t d : digits) x.emplace_back(d, cfg.p);
        FieldVector c = cfg.matrix.mat_vec_mul(x);
        bool ok = std::all_of(partial.begin(), partial.end(), [&](const Share& sh) {
            return c[sh.index - 1] == sh.value;
        });
        if (ok) out.push_back(std::move(x));
        int i = cfg.k - 1;
        while (i >= 0 && ++digits[i] == p) digits[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

std::vector<std::vector<std::int64_t>> codeword_set(const ThresholdConfig& cfg) {
    std::int64_t p = cfg.p.value();
    checked_pow(p, cfg.k);
    std::vector<std::vector<std::int64_t>> words;
    std::vector<std::int64_t> digits(cfg.k, 0);
    for (;;) {
        SecretVector x;
        x.reserve(cfg.k);
        for (std::int64_t d : digits) x.emplace_back(d, cfg.p);
        FieldVector c = cfg.matrix.mat_vec_mul(x);
        std::vector<std::int64_t> word;
        word.reserve(cfg.m);
        for (const FieldElement& e : c) word.push_back(e.value());
        words.push_back(std::move(word));
        int i = cfg.k - 1;
        while (i >= 0 && ++digits[i] == p) digits[i--] = 0;
        if (i < 0) break;
    }
    std::sort(words.begin(), words.end());
    return words;
}

}  // namespace ctqt
