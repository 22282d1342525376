#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctqt/errors.hpp"
#include "ctqt/rng.hpp"

namespace ctqt {

using Complex = std::complex<double>;

// Mixed-radix register of named subsystems. Amplitude indices are big-endian
// in site order: site 0 is the most significant digit.
class Register {
public:
    Register(std::vector<int> dims, std::vector<std::string> labels);

    int sites() const { return static_cast<int>(dims_.size()); }
    int dim(int site) const { return dims_.at(site); }
    const std::vector<int>& dims() const { return dims_; }
    const std::string& label(int site) const { return labels_.at(site); }
    std::size_t total_dim() const { return total_; }
    std::size_t stride(int site) const { return strides_.at(site); }
    int site_of(const std::string& label) const;

private:
    std::vector<int> dims_;
    std::vector<std::string> labels_;
    std::vector<std::size_t> strides_;
    std::size_t total_;
};

// A controller's private measurement basis. Columns of the 2x2 unitary are
// the basis vectors |0~> and |1~> expressed in the computational basis.
struct BasisSpec {
    std::array<Complex, 4> u{Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0)};
    std::string owner;
    bool dealer_private = true;  // known to dealer/controller only

    Complex entry(int row, int col) const { return u[2 * row + col]; }
    bool is_unitary(double tol = 1e-12) const;

    // The basis {|+~>, |-~>} with |+-~> = (|0~> +- |1~>)/sqrt(2).
    BasisSpec plus_minus() const;

    static BasisSpec computational() { return {}; }
    static BasisSpec hadamard();
    static BasisSpec haar(RngStream& rng);  // Haar-random via Ginibre + QR
};

struct MeasurementRecord {
    std::vector<std::string> sites;
    std::string basis;
    int outcome;
    std::vector<double> distribution;  // pre-measurement Born probabilities
};

class StateVector {
public:
    explicit StateVector(Register reg);  // |0...0>
    const Register& reg() const { return reg_; }
    std::span<const Complex> amps() const { return amps_; }
    std::vector<Complex>& mutable_amps() { return amps_; }
    double norm2() const;

private:
    Register reg_;
    std::vector<Complex> amps_;
};

// Product-state initializer. Factors must partition the register's sites;
// each factor carries an explicit amplitude vector over its sites (so an
// entangled input block counts as one factor).
struct ProductFactor {
    std::vector<int> sites;
    std::vector<Complex> amps;
};
StateVector init_product_state(const Register& reg, const std::vector<ProductFactor>& factors);

// Gates. Matrices are row-major; unitarity is checked to 1e-12.
void apply_single(StateVector& st, int site, std::span<const Complex> u);
void apply_two(StateVector& st, int a, int b, std::span<const Complex> u);
// diagonal two-site gate: one unit-modulus phase per joint index ia*db+ib
void apply_two_diag(StateVector& st, int a, int b, std::span<const Complex> phases);
// computational-basis permutation |ia,ib> -> |ia, new_b(ia,ib)>
void apply_two_map(StateVector& st, int a, int b, const std::function<int(int, int)>& new_b);

// Exact Born probabilities without collapse.
std::vector<double> outcome_distribution(const StateVector& st, int site, const BasisSpec& basis);
std::vector<double> outcome_distribution(const StateVector& st, int site);  // computational

// Born-rule sampling with collapse and renormalization.
MeasurementRecord measure_site(StateVector& st, int site, const BasisSpec& basis, RngStream& rng);
MeasurementRecord measure_site_computational(StateVector& st, int site, RngStream& rng);

struct BellOutcome {
    int i;
    int j;
};
// Projects a qubit pair onto the Bell basis |B_{i,j}>.
std::pair<BellOutcome, MeasurementRecord> bell_project(StateVector& st, int a, int b,
                                                       RngStream& rng);

// |B_{i,j}> amplitudes over (x, y), y = j xor x.
std::array<Complex, 4> bell_vector(int i, int j);

// |<a|b>|^2 for same-shape registers.
double fidelity(const StateVector& a, const StateVector& b);

// <psi| (|target><target| on `sites`) (x) I |psi>; equals the fidelity of the
// reduced state on `sites` with the pure target.
double fidelity_on_sites(const StateVector& st, const std::vector<int>& sites,
                         std::span<const Complex> target);

}  // namespace ctqt
