#pragma once

#include <cstdint>
#include <vector>

#include "ctqt/errors.hpp"

namespace ctqt {

// A verified prime modulus. Trial division keeps construction honest for
// the desk-scale primes this library uses (p <= 10^6).
class PrimeModulus {
public:
    explicit PrimeModulus(std::int64_t p);
    std::int64_t value() const { return p_; }

    friend bool operator==(PrimeModulus a, PrimeModulus b) { return a.p_ == b.p_; }
    friend bool operator!=(PrimeModulus a, PrimeModulus b) { return a.p_ != b.p_; }

private:
    std::int64_t p_;
};

// Element of GF(p). Value is kept in [0, p); all arithmetic is closed.
// With p <= 10^6 every product fits comfortably in 64 bits.
class FieldElement {
public:
    FieldElement(std::int64_t value, PrimeModulus modulus);

    std::int64_t value() const { return value_; }
    PrimeModulus modulus() const { return modulus_; }

    FieldElement operator+(FieldElement rhs) const;
    FieldElement operator-(FieldElement rhs) const;
    FieldElement operator*(FieldElement rhs) const;
    FieldElement operator/(FieldElement rhs) const;  // throws DivisionByZero
    FieldElement operator-() const;
    FieldElement inv() const;  // extended Euclid; throws DivisionByZero on 0

    bool operator==(FieldElement rhs) const {
        return value_ == rhs.value_ && modulus_ == rhs.modulus_;
    }
    bool operator!=(FieldElement rhs) const { return !(*this == rhs); }

private:
    void require_same_modulus(FieldElement rhs) const;

    std::int64_t value_;
    PrimeModulus modulus_;
};

using FieldVector = std::vector<FieldElement>;

// Dense matrix over GF(p) with exact Gaussian elimination. Pivoting is
// deterministic: the smallest row index with a nonzero entry wins.
class FieldMatrix {
public:
    FieldMatrix(int rows, int cols, PrimeModulus modulus);  // zero-filled
    static FieldMatrix identity(int n, PrimeModulus modulus);
    static FieldMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                                 PrimeModulus modulus);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    PrimeModulus modulus() const { return modulus_; }

    FieldElement at(int i, int j) const;
    void set(int i, int j, FieldElement v);
    void set(int i, int j, std::int64_t v);

    // Rows picked in the given order; indices are 0-based.
    FieldMatrix select_rows(const std::vector<int>& indices) const;

    FieldVector mat_vec_mul(const FieldVector& x) const;

    int rank() const;

    // Unique solution of A x = b. Throws Inconsistent when no solution
    // exists and NoUniqueSolution when the solution is not unique
    // (rank < cols or rows < cols).
    FieldVector solve_unique(const FieldVector& b) const;

private:
    int rows_, cols_;
    PrimeModulus modulus_;
    std::vector<std::int64_t> data_;  // row-major
};

// V_{m,k}: row i is (1, x_i, x_i^2, ..., x_i^{k-1}) mod p.
FieldMatrix vandermonde(int m, int k, const FieldVector& points);

// Karnin condition: every k-row submatrix of the m x k matrix has rank k.
// Exhaustive over C(m,k) subsets; intended for m <= 12.
bool is_threshold_matrix(const FieldMatrix& a, int k);

// Smallest prime p with p >= m.
PrimeModulus smallest_valid_prime(int m);

}  // namespace ctqt
