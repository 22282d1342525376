#include "ctqt/field.hpp"

#include <algorithm>
#include <numeric>

namespace ctqt {

namespace {

bool is_prime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d) {
        if (p % d == 0) return false;
    }
    return true;
}

std::int64_t mod_reduce(std::int64_t v, std::int64_t p) {
    std::int64_t r = v % p;
    return r < 0 ? r + p : r;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
    // extended Euclid; a in [1, p)
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = p, new_r = a;
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    return mod_reduce(t, p);
}

}  // namespace

PrimeModulus::PrimeModulus(std::int64_t p) : p_(p) {
    if (p > 1000000) throw NotPrime("modulus exceeds the 10^6 cap");
    if (!is_prime(p)) throw NotPrime("modulus " + std::to_string(p) + " is not prime");
}

FieldElement::FieldElement(std::int64_t value, PrimeModulus modulus)
    : value_(mod_reduce(value, modulus.value())), modulus_(modulus) {}

void FieldElement::require_same_modulus(FieldElement rhs) const {
    if (modulus_ != rhs.modulus_)
        throw ModulusMismatch("operands live in different fields");
}

FieldElement FieldElement::operator+(FieldElement rhs) const {
    require_same_modulus(rhs);
    return {value_ + rhs.value_, modulus_};
}

FieldElement FieldElement::operator-(FieldElement rhs) const {
    require_same_modulus(rhs);
    return {value_ - rhs.value_, modulus_};
}

FieldElement FieldElement::operator*(FieldElement rhs) const {
    require_same_modulus(rhs);
    return {value_ * rhs.value_, modulus_};
}

FieldElement FieldElement::operator/(FieldElement rhs) const {
    require_same_modulus(rhs);
    return *this * rhs.inv();
}

FieldElement FieldElement::operator-() const { return {-value_, modulus_}; }

FieldElement FieldElement::inv() const {
    if (value_ == 0) throw DivisionByZero("inverse of zero in GF(p)");
    return {mod_inverse(value_, modulus_.value()), modulus_};
}

FieldMatrix::FieldMatrix(int rows, int cols, PrimeModulus modulus)
    : rows_(rows), cols_(cols), modulus_(modulus),
      data_(static_cast<std::size_t>(rows) * cols, 0) {
    if (rows < 0 || cols < 0) throw BadDimensions("negative matrix dimension");
}

FieldMatrix FieldMatrix::identity(int n, PrimeModulus modulus) {
    FieldMatrix a(n, n, modulus);
    for (int i = 0; i < n; ++i) a.set(i, i, 1);
    return a;
}

FieldMatrix FieldMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                                   PrimeModulus modulus) {
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
    FieldMatrix a(r, c, modulus);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw BadDimensions("ragged row list");
        for (int j = 0; j < c; ++j) a.set(i, j, rows[i][j]);
    }
    return a;
}

FieldElement FieldMatrix::at(int i, int j) const {
    return {data_[static_cast<std::size_t>(i) * cols_ + j], modulus_};
}

void FieldMatrix::set(int i, int j, FieldElement v) {
    if (v.modulus() != modulus_) throw ModulusMismatch("entry modulus differs");
    data_[static_cast<std::size_t>(i) * cols_ + j] = v.value();
}

void FieldMatrix::set(int i, int j, std::int64_t v) {
    data_[static_cast<std::size_t>(i) * cols_ + j] = mod_reduce(v, modulus_.value());
}

FieldMatrix FieldMatrix::select_rows(const std::vector<int>& indices) const {
    FieldMatrix out(static_cast<int>(indices.size()), cols_, modulus_);
    for (int i = 0; i < static_cast<int>(indices.size()); ++i) {
        int src = indices[i];
        if (src < 0 || src >= rows_) throw BadDimensions("row index out of range");
        for (int j = 0; j < cols_; ++j) out.set(i, j, at(src, j));
    }
    return out;
}

FieldVector FieldMatrix::mat_vec_mul(const FieldVector& x) const {
    if (static_cast<int>(x.size()) != cols_)
        throw DimensionMismatch("vector length does not match matrix columns");
    std::int64_t p = modulus_.value();
    FieldVector b;
    b.reserve(rows_);
    for (int i = 0; i < rows_; ++i) {
        std::int64_t acc = 0;
        for (int j = 0; j < cols_; ++j) {
            if (x[j].modulus() != modulus_) throw ModulusMismatch("mixed moduli");
            acc = (acc + data_[static_cast<std::size_t>(i) * cols_ + j] * x[j].value()) % p;
        }
        b.emplace_back(acc, modulus_);
    }
    return b;
}

namespace {

// Row-echelon reduction of an augmented system; returns the rank of the
// coefficient part. `work` is row-major with `cols` total columns of which
// the first `coeff_cols` are the coefficient matrix.
int eliminate(std::vector<std::int64_t>& work, int rows, int cols, int coeff_cols,
              std::int64_t p) {
    int rank = 0;
    for (int col = 0; col < coeff_cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r) {
            if (work[static_cast<std::size_t>(r) * cols + col] != 0) { pivot = r; break; }
        }
        if (pivot < 0) continue;
        for (int j = 0; j < cols; ++j)
            std::swap(work[static_cast<std::size_t>(rank) * cols + j],
                      work[static_cast<std::size_t>(pivot) * cols + j]);
        std::int64_t inv = mod_inverse(work[static_cast<std::size_t>(rank) * cols + col], p);
        for (int j = col; j < cols; ++j) {
            auto& v = work[static_cast<std::size_t>(rank) * cols + j];
            v = v * inv % p;
        }
        for (int r = 0; r < rows; ++r) {
            if (r == rank) continue;
            std::int64_t factor = work[static_cast<std::size_t>(r) * cols + col];
            if (factor == 0) continue;
            for (int j = col; j < cols; ++j) {
                auto& v = work[static_cast<std::size_t>(r) * cols + j];
                v = mod_reduce(v - factor * work[static_cast<std::size_t>(rank) * cols + j], p);
            }
        }
        ++rank;
    }
    return rank;
}

}  // namespace

int FieldMatrix::rank() const {
    std::vector<std::int64_t> work = data_;
    return eliminate(work, rows_, cols_, cols_, modulus_.value());
}

FieldVector FieldMatrix::solve_unique(const FieldVector& b) const {
    if (static_cast<int>(b.size()) != rows_)
        throw DimensionMismatch("right-hand side length mismatch");
    std::int64_t p = modulus_.value();
    int cols = cols_ + 1;
    std::vector<std::int64_t> work(static_cast<std::size_t>(rows_) * cols);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j)
            work[static_cast<std::size_t>(i) * cols + j] =
                data_[static_cast<std::size_t>(i) * cols_ + j];
        if (b[i].modulus() != modulus_) throw ModulusMismatch("mixed moduli");
        work[static_cast<std::size_t>(i) * cols + cols_] = b[i].value();
    }
    int rank = eliminate(work, rows_, cols, cols_, p);
    for (int r = rank; r < rows_; ++r) {
        if (work[static_cast<std::size_t>(r) * cols + cols_] != 0)
            throw Inconsistent("system has no solution");
    }
    if (rows_ < cols_ || rank < cols_)
        throw NoUniqueSolution("system is rank deficient");
    FieldVector x;
    x.reserve(cols_);
    for (int j = 0; j < cols_; ++j)
        x.emplace_back(work[static_cast<std::size_t>(j) * cols + cols_], modulus_);
    // back-substitution check
    FieldVector check = mat_vec_mul(x);
    for (int i = 0; i < rows_; ++i) {
        if (check[i] != b[i]) throw Inconsistent("verification A*x == b failed");
    }
    return x;
}

FieldMatrix vandermonde(int m, int k, const FieldVector& points) {
    if (static_cast<int>(points.size()) != m)
        throw BadDimensions("need exactly m evaluation points");
    if (k < 1 || k > m) throw BadDimensions("require 1 <= k <= m");
    PrimeModulus p = points.at(0).modulus();
    if (m > p.value()) throw BadDimensions("m exceeds field size");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j]) throw DuplicatePoints("evaluation points repeat");
    FieldMatrix a(m, k, p);
    for (int i = 0; i < m; ++i) {
        FieldElement pw(1, p);
        for (int j = 0; j < k; ++j) {
            a.set(i, j, pw);
            pw = pw * points[i];
        }
    }
    return a;
}

namespace {

bool next_combination(std::vector<int>& idx, int n) {
    int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

bool is_threshold_matrix(const FieldMatrix& a, int k) {
    if (a.cols() != k || a.rows() < k) throw BadDimensions("expected an m x k matrix, m >= k");
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    do {
        if (a.select_rows(idx).rank() != k) return false;
    } while (next_combination(idx, a.rows()));
    return true;
}

PrimeModulus smallest_valid_prime(int m) {
    std::int64_t p = std::max<std::int64_t>(2, m);
    while (!is_prime(p)) ++p;
    return PrimeModulus(p);
}

}  // namespace ctqt
