#include "ctqt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ctqt {

namespace {

constexpr std::size_t kDimensionCap = std::size_t{1} << 22;
constexpr double kUnitaryTol = 1e-12;

void check_unitary(std::span<const Complex> u, int d) {
    if (u.size() != static_cast<std::size_t>(d) * d)
        throw BadDimension("gate matrix size mismatch");
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Complex acc = 0;
            for (int k = 0; k < d; ++k)
                acc += std::conj(u[static_cast<std::size_t>(k) * d + i]) *
                       u[static_cast<std::size_t>(k) * d + j];
            if (std::abs(acc - (i == j ? 1.0 : 0.0)) > kUnitaryTol)
                throw NonUnitary("gate is not unitary within 1e-12");
        }
    }
}

}  // namespace

Register::Register(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.size() != labels_.size()) throw BadDimension("dims/labels length mismatch");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw BadDimension("site labels must be unique");
    total_ = 1;
    for (int d : dims_) {
        if (d < 2) throw BadDimension("every subsystem dimension must be >= 2");
        if (total_ > kDimensionCap / static_cast<std::size_t>(d))
            throw CapExceeded("register exceeds the 2^22 amplitude cap");
        total_ *= static_cast<std::size_t>(d);
    }
    strides_.resize(dims_.size());
    std::size_t s = 1;
    for (int i = sites() - 1; i >= 0; --i) {
        strides_[i] = s;
        s *= static_cast<std::size_t>(dims_[i]);
    }
}

int Register::site_of(const std::string& label) const {
    for (int i = 0; i < sites(); ++i)
        if (labels_[i] == label) return i;
    throw BadDimension("unknown site label " + label);
}

bool BasisSpec::is_unitary(double tol) const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Complex acc = std::conj(entry(0, i)) * entry(0, j) +
                          std::conj(entry(1, i)) * entry(1, j);
            if (std::abs(acc - (i == j ? 1.0 : 0.0)) > tol) return false;
        }
    return true;
}

BasisSpec BasisSpec::plus_minus() const {
    const double r = 1.0 / std::sqrt(2.0);
    BasisSpec out = *this;
    // U * H: columns become (col0 +- col1)/sqrt(2)
    out.u = {r * (entry(0, 0) + entry(0, 1)), r * (entry(0, 0) - entry(0, 1)),
             r * (entry(1, 0) + entry(1, 1)), r * (entry(1, 0) - entry(1, 1))};
    return out;
}

BasisSpec BasisSpec::hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    BasisSpec b;
    b.u = {Complex(r, 0), Complex(r, 0), Complex(r, 0), Complex(-r, 0)};
    return b;
}

BasisSpec BasisSpec::haar(RngStream& rng) {
    // Ginibre matrix, then Gram-Schmidt with positive diagonal R
    std::array<Complex, 4> g;
    for (auto& z : g) z = Complex(rng.gaussian(), rng.gaussian());
    Complex a0 = g[0], a1 = g[2];  // column 0
    double n0 = std::sqrt(std::norm(a0) + std::norm(a1));
    a0 /= n0;
    a1 /= n0;
    Complex b0 = g[1], b1 = g[3];  // column 1
    Complex proj = std::conj(a0) * b0 + std::conj(a1) * b1;
    b0 -= proj * a0;
    b1 -= proj * a1;
    double n1 = std::sqrt(std::norm(b0) + std::norm(b1));
    b0 /= n1;
    b1 /= n1;
    BasisSpec b;
    b.u = {a0, b0, a1, b1};
    return b;
}

StateVector::StateVector(Register reg) : reg_(std::move(reg)), amps_(reg_.total_dim(), 0.0) {
    amps_[0] = 1.0;
}

double StateVector::norm2() const {
    double acc = 0;
    for (const Complex& a : amps_) acc += std::norm(a);
    return acc;
}

StateVector init_product_state(const Register& reg, const std::vector<ProductFactor>& factors) {
    std::vector<int> owner(reg.sites(), -1);
    for (std::size_t f = 0; f < factors.size(); ++f) {
        std::size_t dim = 1;
        for (int site : factors[f].sites) {
            if (site < 0 || site >= reg.sites() || owner[site] != -1)
                throw BadDimension("factors must partition the register");
            owner[site] = static_cast<int>(f);
            dim *= static_cast<std::size_t>(reg.dim(site));
        }
        if (factors[f].amps.size() != dim)
            throw BadDimension("factor amplitude length mismatch");
    }
    for (int o : owner)
        if (o == -1) throw BadDimension("factors must cover every site");

    StateVector st(reg);
    auto& amps = st.mutable_amps();
    for (std::size_t idx = 0; idx < reg.total_dim(); ++idx) {
        Complex v = 1.0;
        for (const ProductFactor& f : factors) {
            std::size_t sub = 0;
            for (int site : f.sites) {
                int digit = static_cast<int>((idx / reg.stride(site)) % reg.dim(site));
                sub = sub * static_cast<std::size_t>(reg.dim(site)) + digit;
            }
            v *= f.amps[sub];
        }
        amps[idx] = v;
    }
    return st;
}

void apply_single(StateVector& st, int site, std::span<const Complex> u) {
    const Register& reg = st.reg();
    int d = reg.dim(site);
    check_unitary(u, d);
    std::size_t str = reg.stride(site);
    std::size_t block = str * static_cast<std::size_t>(d);
    auto& amps = st.mutable_amps();
    std::vector<Complex> v(d), w(d);
    for (std::size_t base = 0; base < reg.total_dim(); base += block) {
        for (std::size_t off = 0; off < str; ++off) {
            for (int i = 0; i < d; ++i) v[i] = amps[base + static_cast<std::size_t>(i) * str + off];
            for (int i = 0; i < d; ++i) {
                Complex acc = 0;
                for (int j = 0; j < d; ++j) acc += u[static_cast<std::size_t>(i) * d + j] * v[j];
                w[i] = acc;
            }
            for (int i = 0; i < d; ++i) amps[base + static_cast<std::size_t>(i) * str + off] = w[i];
        }
    }
}

namespace {

struct TwoSite {
    int da, db;
    std::size_t sa, sb;
};

TwoSite two_site_info(const Register& reg, int a, int b) {
    if (a == b) throw SiteCollision("two-site gate needs distinct sites");
    return {reg.dim(a), reg.dim(b), reg.stride(a), reg.stride(b)};
}

// Visits one representative index per configuration of the remaining sites
// (the index with digits at a and b zeroed).
template <typename F>
void for_each_rest(const StateVector& st, int a, int b, const TwoSite& t, F&& body) {
    const Register& reg = st.reg();
    for (std::size_t idx = 0; idx < reg.total_dim(); ++idx) {
        if ((idx / t.sa) % static_cast<std::size_t>(t.da) != 0) continue;
        if ((idx / t.sb) % static_cast<std::size_t>(t.db) != 0) continue;
        body(idx);
    }
}

}  // namespace

void apply_two(StateVector& st, int a, int b, std::span<const Complex> u) {
    TwoSite t = two_site_info(st.reg(), a, b);
    int dd = t.da * t.db;
    check_unitary(u, dd);
    auto& amps = st.mutable_amps();
    std::vector<Complex> v(dd), w(dd);
    for_each_rest(st, a, b, t, [&](std::size_t base) {
        for (int ia = 0; ia < t.da; ++ia)
            for (int ib = 0; ib < t.db; ++ib)
                v[ia * t.db + ib] = amps[base + ia * t.sa + ib * t.sb];
        for (int i = 0; i < dd; ++i) {
            Complex acc = 0;
            for (int j = 0; j < dd; ++j) acc += u[static_cast<std::size_t>(i) * dd + j] * v[j];
            w[i] = acc;
        }
        for (int ia = 0; ia < t.da; ++ia)
            for (int ib = 0; ib < t.db; ++ib)
                amps[base + ia * t.sa + ib * t.sb] = w[ia * t.db + ib];
    });
}

void apply_two_diag(StateVector& st, int a, int b, std::span<const Complex> phases) {
    TwoSite t = two_site_info(st.reg(), a, b);
    if (phases.size() != static_cast<std::size_t>(t.da) * t.db)
        throw BadDimension("phase vector size mismatch");
    for (const Complex& p : phases)
        if (std::abs(std::abs(p) - 1.0) > kUnitaryTol)
            throw NonUnitary("diagonal entries must have unit modulus");
    auto& amps = st.mutable_amps();
    for_each_rest(st, a, b, t, [&](std::size_t base) {
        for (int ia = 0; ia < t.da; ++ia)
            for (int ib = 0; ib < t.db; ++ib)
                amps[base + ia * t.sa + ib * t.sb] *= phases[ia * t.db + ib];
    });
}

void apply_two_map(StateVector& st, int a, int b, const std::function<int(int, int)>& new_b) {
    TwoSite t = two_site_info(st.reg(), a, b);
    for (int ia = 0; ia < t.da; ++ia) {
        std::vector<bool> hit(t.db, false);
        for (int ib = 0; ib < t.db; ++ib) {
            int nb = new_b(ia, ib);
            if (nb < 0 || nb >= t.db || hit[nb])
                throw NonUnitary("map gate must permute the target digit");
            hit[nb] = true;
        }
    }
    auto& amps = st.mutable_amps();
    std::vector<Complex> v(t.db);
    for_each_rest(st, a, b, t, [&](std::size_t base) {
        for (int ia = 0; ia < t.da; ++ia) {
            for (int ib = 0; ib < t.db; ++ib) v[ib] = amps[base + ia * t.sa + ib * t.sb];
            for (int ib = 0; ib < t.db; ++ib)
                amps[base + ia * t.sa + new_b(ia, ib) * t.sb] = v[ib];
        }
    });
}

namespace {

// Measurement in an explicit d x d basis matrix (columns = basis vectors).
std::vector<double> distribution_in_matrix(const StateVector& st, int site,
                                           std::span<const Complex> basis) {
    const Register& reg = st.reg();
    int d = reg.dim(site);
    check_unitary(basis, d);
    std::size_t str = reg.stride(site);
    std::size_t block = str * static_cast<std::size_t>(d);
    std::vector<double> probs(d, 0.0);
    std::vector<Complex> v(d);
    auto amps = st.amps();
    for (std::size_t base = 0; base < reg.total_dim(); base += block) {
        for (std::size_t off = 0; off < str; ++off) {
            for (int i = 0; i < d; ++i) v[i] = amps[base + static_cast<std::size_t>(i) * str + off];
            for (int o = 0; o < d; ++o) {
                Complex w = 0;
                for (int i = 0; i < d; ++i)
                    w += std::conj(basis[static_cast<std::size_t>(i) * d + o]) * v[i];
                probs[o] += std::norm(w);
            }
        }
    }
    return probs;
}

void collapse_in_matrix(StateVector& st, int site, std::span<const Complex> basis, int outcome,
                        double prob) {
    const Register& reg = st.reg();
    int d = reg.dim(site);
    std::size_t str = reg.stride(site);
    std::size_t block = str * static_cast<std::size_t>(d);
    double scale = 1.0 / std::sqrt(prob);
    auto& amps = st.mutable_amps();
    std::vector<Complex> v(d);
    for (std::size_t base = 0; base < reg.total_dim(); base += block) {
        for (std::size_t off = 0; off < str; ++off) {
            Complex w = 0;
            for (int i = 0; i < d; ++i)
                w += std::conj(basis[static_cast<std::size_t>(i) * d + outcome]) *
                     amps[base + static_cast<std::size_t>(i) * str + off];
            for (int i = 0; i < d; ++i)
                amps[base + static_cast<std::size_t>(i) * str + off] =
                    basis[static_cast<std::size_t>(i) * d + outcome] * w * scale;
        }
    }
}

std::vector<Complex> identity_matrix(int d) {
    std::vector<Complex> m(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i) * d + i] = 1.0;
    return m;
}

std::vector<Complex> basis_matrix_for(const StateVector& st, int site, const BasisSpec& basis) {
    if (st.reg().dim(site) != 2)
        throw BasisDimensionMismatch("2x2 basis on a non-qubit site");
    return {basis.u.begin(), basis.u.end()};
}

MeasurementRecord measure_in_matrix(StateVector& st, int site, std::span<const Complex> basis,
                                    const std::string& name, RngStream& rng) {
    std::vector<double> probs = distribution_in_matrix(st, site, basis);
    int outcome = rng.sample(probs);
    collapse_in_matrix(st, site, basis, outcome, probs[outcome]);
    return {{st.reg().label(site)}, name, outcome, std::move(probs)};
}

}  // namespace

std::vector<double> outcome_distribution(const StateVector& st, int site, const BasisSpec& basis) {
    return distribution_in_matrix(st, site, basis_matrix_for(st, site, basis));
}

std::vector<double> outcome_distribution(const StateVector& st, int site) {
    return distribution_in_matrix(st, site, identity_matrix(st.reg().dim(site)));
}

MeasurementRecord measure_site(StateVector& st, int site, const BasisSpec& basis, RngStream& rng) {
    return measure_in_matrix(st, site, basis_matrix_for(st, site, basis), "private-2x2", rng);
}

MeasurementRecord measure_site_computational(StateVector& st, int site, RngStream& rng) {
    return measure_in_matrix(st, site, identity_matrix(st.reg().dim(site)), "computational", rng);
}

std::array<Complex, 4> bell_vector(int i, int j) {
    const double r = 1.0 / std::sqrt(2.0);
    std::array<Complex, 4> v{};
    for (int x = 0; x < 2; ++x) {
        double sign = (x && i) ? -1.0 : 1.0;
        v[static_cast<std::size_t>(x) * 2 + (j ^ x)] = sign * r;
    }
    return v;
}

std::pair<BellOutcome, MeasurementRecord> bell_project(StateVector& st, int a, int b,
                                                       RngStream& rng) {
    const Register& reg = st.reg();
    if (reg.dim(a) != 2 || reg.dim(b) != 2)
        throw NotQubit("Bell projection requires two qubit sites");
    TwoSite t = two_site_info(reg, a, b);

    // 4x4 basis matrix with column (i*2+j) = |B_{i,j}> over (x,y)
    std::array<Complex, 16> basis{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            auto v = bell_vector(i, j);
            for (int xy = 0; xy < 4; ++xy) basis[static_cast<std::size_t>(xy) * 4 + (i * 2 + j)] = v[xy];
        }

    std::vector<double> probs(4, 0.0);
    auto& amps = st.mutable_amps();
    for_each_rest(st, a, b, t, [&](std::size_t base) {
        for (int o = 0; o < 4; ++o) {
            Complex w = 0;
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    w += std::conj(basis[static_cast<std::size_t>(x * 2 + y) * 4 + o]) *
                         amps[base + x * t.sa + y * t.sb];
            probs[o] += std::norm(w);
        }
    });
    int outcome = rng.sample(probs);
    double scale = 1.0 / std::sqrt(probs[outcome]);
    for_each_rest(st, a, b, t, [&](std::size_t base) {
        Complex w = 0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                w += std::conj(basis[static_cast<std::size_t>(x * 2 + y) * 4 + outcome]) *
                     amps[base + x * t.sa + y * t.sb];
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                amps[base + x * t.sa + y * t.sb] =
                    basis[static_cast<std::size_t>(x * 2 + y) * 4 + outcome] * w * scale;
    });
    MeasurementRecord rec{{reg.label(a), reg.label(b)}, "bell", outcome, std::move(probs)};
    return {{outcome / 2, outcome % 2}, std::move(rec)};
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.reg().dims() != b.reg().dims())
        throw ShapeMismatch("states live on different registers");
    Complex overlap = 0;
    auto va = a.amps();
    auto vb = b.amps();
    for (std::size_t i = 0; i < va.size(); ++i) overlap += std::conj(va[i]) * vb[i];
    return std::norm(overlap);
}

double fidelity_on_sites(const StateVector& st, const std::vector<int>& sites,
                         std::span<const Complex> target) {
    const Register& reg = st.reg();
    std::size_t tdim = 1;
    for (int s : sites) tdim *= static_cast<std::size_t>(reg.dim(s));
    if (target.size() != tdim) throw ShapeMismatch("target length mismatch");

    std::vector<Complex> acc(reg.total_dim(), 0.0);
    auto amps = st.amps();
    for (std::size_t idx = 0; idx < reg.total_dim(); ++idx) {
        std::size_t tindex = 0;
        std::size_t rest = idx;
        for (int s : sites) {
            std::size_t digit = (idx / reg.stride(s)) % static_cast<std::size_t>(reg.dim(s));
            tindex = tindex * static_cast<std::size_t>(reg.dim(s)) + digit;
            rest -= digit * reg.stride(s);
        }
        acc[rest] += std::conj(target[tindex]) * amps[idx];
    }
    double f = 0;
    for (const Complex& v : acc) f += std::norm(v);
    return f;
}

}  // namespace ctqt
