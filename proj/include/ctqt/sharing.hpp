#pragma once

#include <cstdint>
#include <vector>

#include "ctqt/field.hpp"

namespace ctqt {

// One controller's classical key c_s. Indices are 1-based and match the
// controller labels C_1..C_m.
struct Share {
    int index;
    FieldElement value;

    bool operator==(const Share& rhs) const {
        return index == rhs.index && value == rhs.value;
    }
};

using ShareSet = std::vector<Share>;
using SecretVector = FieldVector;  // the hidden vector x, length k

// (k,m)-threshold configuration: keys are c = A x over GF(p) with an m x k
// share matrix A satisfying the Karnin row-striking condition.
struct ThresholdConfig {
    int k;
    int m;
    PrimeModulus p;
    FieldMatrix matrix;
    FieldVector points;

    ThresholdConfig(int k, int m, PrimeModulus p, FieldMatrix matrix, FieldVector points);

    // Vandermonde matrix on the default points x_s = s-1, p = smallest prime >= m
    // unless given explicitly.
    static ThresholdConfig standard(int k, int m);
    static ThresholdConfig standard(int k, int m, PrimeModulus p);
};

// c = A x mod p; returns all m shares.
ShareSet generate_shares(const SecretVector& x, const ThresholdConfig& cfg);

// Solves for x from >= k shares and returns the full share vector.
// Throws InsufficientShares below threshold and InconsistentShares when the
// supplied shares lie on no codeword (a wrong key is detectable only with
// more than k shares).
ShareSet reconstruct_keys(const ShareSet& partial, const ThresholdConfig& cfg);

// All secrets x whose codeword agrees with the partial share set. Exhaustive
// over GF(p)^k; throws EnumerationTooLarge past 10^6 candidates.
std::vector<SecretVector> consistent_secrets(const ShareSet& partial,
                                             const ThresholdConfig& cfg);

// The codeword set S = { A x : x in GF(p)^k }, sorted; size is exactly p^k.
std::vector<std::vector<std::int64_t>> codeword_set(const ThresholdConfig& cfg);

}  // namespace ctqt
