#include "ctqt/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ctqt {

namespace {

const char* kAlice = "alice";
const char* kBob = "bob";

std::string controller_name(int s) { return "C" + std::to_string(s); }

bool uses_classical_keys(SchemeKind s) {
    return s == SchemeKind::Classical || s == SchemeKind::EconQubit ||
           s == SchemeKind::EconBob;
}

bool uses_solicits(SchemeKind s) {
    return s == SchemeKind::EconQubit || s == SchemeKind::EconBob;
}

std::array<Complex, 4> econ_recovery_diag(std::int64_t r, std::int64_t c, std::int64_t p) {
    // diag[exp(-i 2 pi r c / p), exp(-i 2 pi (not r) c / p)]
    double phi = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(p);
    Complex d0 = std::polar(1.0, -phi * static_cast<double>(r));
    Complex d1 = std::polar(1.0, -phi * static_cast<double>(1 - r));
    return {d0, Complex(0, 0), Complex(0, 0), d1};
}

}  // namespace

std::string to_string(SchemeKind s) {
    switch (s) {
        case SchemeKind::GhzMm: return "ghz";
        case SchemeKind::QuditPoly: return "qudit-poly";
        case SchemeKind::Classical: return "classical";
        case SchemeKind::EconQubit: return "econ-qubit";
        case SchemeKind::EconBob: return "econ-bob";
    }
    return "?";
}

SchemeKind scheme_from_string(const std::string& s) {
    if (s == "ghz") return SchemeKind::GhzMm;
    if (s == "qudit-poly") return SchemeKind::QuditPoly;
    if (s == "classical") return SchemeKind::Classical;
    if (s == "econ-qubit") return SchemeKind::EconQubit;
    if (s == "econ-bob") return SchemeKind::EconBob;
    throw ParseError("unknown scheme: " + s);
}

std::string to_string(ScenarioKind s) {
    switch (s) {
        case ScenarioKind::Honest: return "honest";
        case ScenarioKind::BobStealsKeys: return "bob-steals-keys";
        case ScenarioKind::ScheduleViolation: return "schedule-violation";
        case ScenarioKind::WrongOutcome: return "wrong-outcome";
        case ScenarioKind::WrongKey: return "wrong-key";
    }
    return "?";
}

ScenarioKind scenario_from_string(const std::string& s) {
    if (s == "honest") return ScenarioKind::Honest;
    if (s == "bob-steals-keys") return ScenarioKind::BobStealsKeys;
    if (s == "schedule-violation") return ScenarioKind::ScheduleViolation;
    if (s == "wrong-outcome") return ScenarioKind::WrongOutcome;
    if (s == "wrong-key") return ScenarioKind::WrongKey;
    throw ParseError("unknown scenario: " + s);
}

std::string to_string(Message::Kind k) {
    switch (k) {
        case Message::Kind::BellOutcomes: return "BellOutcomes";
        case Message::Kind::AgreeReport: return "AgreeReport";
        case Message::Kind::Solicit: return "Solicit";
        case Message::Kind::SolicitReply: return "SolicitReply";
        case Message::Kind::ClassicalKey: return "ClassicalKey";
        case Message::Kind::Abort: return "Abort";
    }
    return "?";
}

std::string transcript_to_string(const std::vector<Message>& transcript) {
    std::ostringstream os;
    for (const Message& m : transcript) {
        os << m.seq << ' ' << m.sender << "->" << m.receiver << ' ' << to_string(m.kind);
        if (m.kind == Message::Kind::BellOutcomes) {
            for (auto [i, j] : m.bell) os << " (" << i << ',' << j << ')';
        } else if (m.kind == Message::Kind::Abort) {
            os << ' ' << m.reason;
        } else {
            os << " s=" << m.s << " outcome=" << m.outcome;
            if (m.key >= 0) os << " key=" << m.key;
        }
        os << '\n';
    }
    return os.str();
}

std::int64_t RunConfig::effective_p() const {
    return p != 0 ? p : smallest_valid_prime(m).value();
}

std::vector<int> RunConfig::effective_channels() const {
    if (!channels.empty()) return channels;
    return std::vector<int>(m, n);
}

void RunConfig::validate() const {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (m < 1) throw ValidationError("m must be >= 1");
    if (k < 1 || k > m) throw ValidationError("require 1 <= k <= m");
    if (scheme == SchemeKind::GhzMm && k != m)
        throw ValidationError("GHZ control requires k = m");
    std::int64_t pp = effective_p();
    if (pp < m) throw ValidationError("require p >= m");
    PrimeModulus check(pp);  // throws NotPrime
    (void)check;
    std::set<int> seen;
    for (int s : agree) {
        if (s < 1 || s > m) throw ValidationError("agree index out of range");
        if (!seen.insert(s).second) throw ValidationError("duplicate agree index");
    }
    if (!channels.empty()) {
        if (static_cast<int>(channels.size()) != m)
            throw ValidationError("channel assignment must cover all m controllers");
        for (int c : channels) {
            if (c < 1 || c > n) throw ValidationError("channel index out of range");
            if (scheme != SchemeKind::EconBob && c != n)
                throw ValidationError("only econ-bob supports multi-channel control");
        }
    }
    for (int s : scenario.members)
        if (s < 1 || s > m) throw ValidationError("scenario controller index out of range");
    if (scenario.kind == ScenarioKind::WrongOutcome || scenario.kind == ScenarioKind::WrongKey) {
        if (scenario.liar < 1 || scenario.liar > m)
            throw ValidationError("liar index out of range");
    }
    if (scenario.kind == ScenarioKind::WrongKey && !uses_classical_keys(scheme) &&
        scheme != SchemeKind::QuditPoly)
        throw ValidationError("wrong-key scenario needs a scheme with keys");
    if (scenario.kind == ScenarioKind::BobStealsKeys && !uses_classical_keys(scheme))
        throw ValidationError("bob-steals-keys scenario needs classical keys");
    if (!input.empty()) {
        if (input.size() != (std::size_t{1} << n))
            throw ValidationError("input state must have 2^n amplitudes");
        double norm = 0;
        for (const Complex& a : input) norm += std::norm(a);
        if (std::abs(norm - 1.0) > 1e-9)
            throw ValidationError("input state is not normalized");
    }
    if (!secret.empty()) {
        if (static_cast<int>(secret.size()) != k)
            throw ValidationError("secret must have length k");
        for (std::int64_t v : secret)
            if (v < 0 || v >= pp) throw ValidationError("secret entry outside GF(p)");
    }
    if (!bases.empty()) {
        if (static_cast<int>(bases.size()) != m)
            throw ValidationError("need one basis per controller");
        for (const BasisSpec& b : bases)
            if (!b.is_unitary()) throw ValidationError("controller basis is not unitary");
    }
}

ProtocolRun::ProtocolRun(RunConfig cfg)
    : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.validate();
}

Message& ProtocolRun::post(Message msg) {
    msg.seq = seq_++;
    transcript_.push_back(std::move(msg));
    return transcript_.back();
}

void ProtocolRun::dealer_setup() {
    std::int64_t p = cfg_.effective_p();
    PrimeModulus pm(p);
    if (cfg_.scheme != SchemeKind::GhzMm && cfg_.scheme != SchemeKind::Classical)
        tcfg_.emplace(ThresholdConfig::standard(cfg_.k, cfg_.m, pm));
    else if (cfg_.scheme == SchemeKind::Classical)
        tcfg_.emplace(ThresholdConfig::standard(cfg_.k, cfg_.m, pm));

    // Draw order is fixed: secret, bases, input, then measurements in
    // schedule order. Transcripts replay bit-for-bit from the seed.
    if (uses_classical_keys(cfg_.scheme)) {
        secret_.clear();
        if (!cfg_.secret.empty()) {
            for (std::int64_t v : cfg_.secret) secret_.emplace_back(v, pm);
        } else {
            for (int i = 0; i < cfg_.k; ++i) secret_.emplace_back(rng_.uniform_int(p), pm);
        }
        shares_ = generate_shares(secret_, *tcfg_);
    }

    bases_.clear();
    if (!cfg_.bases.empty()) {
        bases_ = cfg_.bases;
    } else {
        for (int s = 1; s <= cfg_.m; ++s) {
            BasisSpec b = cfg_.scheme == SchemeKind::QuditPoly ? BasisSpec::computational()
                                                               : BasisSpec::haar(rng_);
            b.owner = controller_name(s);
            bases_.push_back(std::move(b));
        }
    }

    if (!cfg_.input.empty()) {
        input_ = cfg_.input;
    } else {
        input_.resize(std::size_t{1} << cfg_.n);
        double norm = 0;
        for (Complex& a : input_) {
            a = Complex(rng_.gaussian(), rng_.gaussian());
            norm += std::norm(a);
        }
        double scale = 1.0 / std::sqrt(norm);
        for (Complex& a : input_) a *= scale;
    }

    channel_of_ = cfg_.effective_channels();
    const std::vector<int>& actors = cfg_.scenario.kind == ScenarioKind::ScheduleViolation
                                         ? cfg_.scenario.members
                                         : cfg_.agree;
    acting_ = std::set<int>(actors.begin(), actors.end());
    setup_done_ = true;
}

void ProtocolRun::prepare_econ_controller(int s, int channel) {
    std::int64_t p = cfg_.effective_p();
    std::int64_t c = shares_[s - 1].value.value();
    const BasisSpec& basis = bases_[s - 1];

    // Hadamard in the controller's basis: U H U^dagger on |0~> -> (|0~>+|1~>)/sqrt(2)
    const double r = 1.0 / std::sqrt(2.0);
    std::array<Complex, 4> h{Complex(r, 0), Complex(r, 0), Complex(r, 0), Complex(-r, 0)};
    std::array<Complex, 4> hb{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Complex acc = 0;
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    acc += basis.entry(i, x) * h[2 * x + y] * std::conj(basis.entry(j, y));
            hb[2 * i + j] = acc;
        }
    apply_single(*state_, site_c(s), hb);
    ++metrics_.prep_single_qubit_ops;

    // diag[1, w, w, 1] with w = exp(i 2 pi c_s / p), in the basis
    // {|0>,|1>}_A (x) {|0~>,|1~>}_C
    Complex w = std::polar(1.0, 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(p));
    std::array<Complex, 4> d{Complex(1, 0), w, w, Complex(1, 0)};  // by (y, ctilde)
    std::array<Complex, 16> gate{};
    for (int y = 0; y < 2; ++y)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Complex acc = 0;
                for (int x = 0; x < 2; ++x)
                    acc += basis.entry(i, x) * d[2 * y + x] * std::conj(basis.entry(j, x));
                gate[static_cast<std::size_t>(y * 2 + i) * 4 + (y * 2 + j)] = acc;
            }
    apply_two(*state_, site_a(channel), site_c(s), gate);
    ++metrics_.prep_two_qubit_ops;
}

void ProtocolRun::prepare_shared_state() {
    if (!setup_done_) throw ProtocolOrderViolation("dealer_setup must run first");
    int n = cfg_.n, m = cfg_.m;
    std::int64_t p = cfg_.effective_p();
    bool qudits = cfg_.scheme == SchemeKind::QuditPoly;
    bool has_c_sites = cfg_.scheme != SchemeKind::Classical;

    std::vector<int> dims;
    std::vector<std::string> labels;
    for (int l = 1; l <= n; ++l) { dims.push_back(2); labels.push_back("A'" + std::to_string(l)); }
    for (int l = 1; l <= n; ++l) { dims.push_back(2); labels.push_back("A" + std::to_string(l)); }
    for (int l = 1; l <= n; ++l) { dims.push_back(2); labels.push_back("B" + std::to_string(l)); }
    if (has_c_sites)
        for (int s = 1; s <= m; ++s) {
            dims.push_back(qudits ? static_cast<int>(p) : 2);
            labels.push_back(controller_name(s));
        }
    Register reg(std::move(dims), std::move(labels));

    std::vector<ProductFactor> factors;
    ProductFactor in;
    for (int l = 1; l <= n; ++l) in.sites.push_back(site_ap(l));
    in.amps = input_;
    factors.push_back(std::move(in));
    bool econ = cfg_.scheme == SchemeKind::EconQubit || cfg_.scheme == SchemeKind::EconBob;
    for (int site = n; site < reg.sites(); ++site) {
        ProductFactor f;
        f.sites = {site};
        f.amps.assign(reg.dim(site), Complex(0, 0));
        if (econ && site >= site_c(1)) {
            // controller qubits start in |0~_s>, a free basis-vector preparation
            const BasisSpec& basis = bases_[static_cast<std::size_t>(site - site_c(1))];
            f.amps[0] = basis.entry(0, 0);
            f.amps[1] = basis.entry(1, 0);
        } else {
            f.amps[0] = 1.0;
        }
        factors.push_back(std::move(f));
    }
    state_.emplace(init_product_state(reg, factors));

    // channel skeleton: H + CNOT per A_l B_l pair
    const double r = 1.0 / std::sqrt(2.0);
    std::array<Complex, 4> h{Complex(r, 0), Complex(r, 0), Complex(r, 0), Complex(-r, 0)};
    std::array<Complex, 16> cnot{};
    cnot[0] = cnot[5] = cnot[11] = cnot[14] = 1.0;  // |x,y> -> |x, y^x>
    for (int l = 1; l <= n; ++l) {
        apply_single(*state_, site_a(l), h);
        apply_two(*state_, site_a(l), site_b(l), cnot);
        ++metrics_.prep_single_qubit_ops;
        ++metrics_.prep_two_qubit_ops;
    }

    switch (cfg_.scheme) {
        case SchemeKind::GhzMm:
            for (int s = 1; s <= m; ++s) {
                apply_two(*state_, site_a(n), site_c(s), cnot);
                apply_single(*state_, site_c(s), bases_[s - 1].u);
                ++metrics_.prep_two_qubit_ops;
                ++metrics_.prep_single_qubit_ops;
            }
            break;
        case SchemeKind::Classical: {
            // kappa(y) is the scalar exp(i y theta), theta = sum 2 pi c_s / p
            double theta = 0;
            for (const Share& sh : shares_)
                theta += 2.0 * M_PI * static_cast<double>(sh.value.value()) /
                         static_cast<double>(p);
            std::array<Complex, 4> d{Complex(1, 0), Complex(1, 0), Complex(1, 0),
                                     std::polar(1.0, theta)};
            apply_two_diag(*state_, site_a(n), site_b(n), d);
            ++metrics_.prep_two_qubit_ops;
            break;
        }
        case SchemeKind::EconQubit:
            for (int s = 1; s <= m; ++s) prepare_econ_controller(s, n);
            break;
        case SchemeKind::EconBob:
            for (int s = 1; s <= m; ++s) prepare_econ_controller(s, channel_of_[s - 1]);
            break;
        case SchemeKind::QuditPoly: {
            // Uniform superposition over the codeword set: Fourier the first k
            // qudits, then compute the remaining digits with modular-add gates
            // (the top k x k Vandermonde block is invertible).
            int pd = static_cast<int>(p);
            std::vector<Complex> fourier(static_cast<std::size_t>(pd) * pd);
            double rq = 1.0 / std::sqrt(static_cast<double>(pd));
            for (int a = 0; a < pd; ++a)
                for (int b = 0; b < pd; ++b)
                    fourier[static_cast<std::size_t>(a) * pd + b] =
                        rq * std::polar(1.0, 2.0 * M_PI * a * b / pd);
            for (int j = 1; j <= cfg_.k; ++j) {
                apply_single(*state_, site_c(j), fourier);
                ++metrics_.prep_single_qubit_ops;
            }
            const FieldMatrix& a = tcfg_->matrix;
            PrimeModulus pm(p);
            FieldMatrix top(cfg_.k, cfg_.k, pm);
            for (int i = 0; i < cfg_.k; ++i)
                for (int j = 0; j < cfg_.k; ++j) top.set(i, j, a.at(i, j));
            // columns of top^{-1} via k solves
            FieldMatrix top_inv(cfg_.k, cfg_.k, pm);
            for (int col = 0; col < cfg_.k; ++col) {
                FieldVector e;
                for (int i = 0; i < cfg_.k; ++i) e.emplace_back(i == col ? 1 : 0, pm);
                FieldVector x = top.solve_unique(e);
                for (int i = 0; i < cfg_.k; ++i) top_inv.set(i, col, x[i]);
            }
            for (int s = cfg_.k + 1; s <= m; ++s) {
                for (int j = 1; j <= cfg_.k; ++j) {
                    std::int64_t coeff = 0;  // (A_low top^{-1})_{s,j}
                    for (int t = 0; t < cfg_.k; ++t)
                        coeff = (coeff + a.at(s - 1, t).value() * top_inv.at(t, j - 1).value()) % p;
                    if (coeff == 0) continue;
                    apply_two_map(*state_, site_c(j), site_c(s),
                                  [coeff, pd](int src, int dst) {
                                      return static_cast<int>(
                                          (dst + coeff * src) % pd);
                                  });
                    ++metrics_.prep_two_qubit_ops;
                }
            }
            // phase attachment exp(i y c_s pi / p) per controller
            for (int s = 1; s <= m; ++s) {
                std::vector<Complex> phases(static_cast<std::size_t>(2) * pd);
                for (int y = 0; y < 2; ++y)
                    for (int c = 0; c < pd; ++c)
                        phases[static_cast<std::size_t>(y) * pd + c] =
                            std::polar(1.0, M_PI * y * c / static_cast<double>(pd));
                apply_two_diag(*state_, site_a(n), site_c(s), phases);
                ++metrics_.prep_two_qubit_ops;
            }
            break;
        }
    }
    prepared_ = true;
}

void ProtocolRun::alice_run() {
    if (!prepared_) throw ProtocolOrderViolation("state not prepared");
    bell_.clear();
    for (int l = 1; l <= cfg_.n; ++l) {
        auto [outcome, rec] = bell_project(*state_, site_ap(l), site_a(l), rng_);
        bell_.emplace_back(outcome.i, outcome.j);
        records_.push_back(std::move(rec));
        ++metrics_.bell_measurements;
    }
    Message msg;
    msg.sender = kAlice;
    msg.receiver = kBob;
    msg.kind = Message::Kind::BellOutcomes;
    msg.bell = bell_;
    post(std::move(msg));
    alice_done_ = true;
}

void ProtocolRun::controller_act(int s, bool forced_by_solicit) {
    if (!alice_done_) throw ProtocolOrderViolation("controllers act after Alice");
    if (!forced_by_solicit && !acting_.count(s) &&
        cfg_.scenario.kind != ScenarioKind::ScheduleViolation)
        throw ProtocolOrderViolation("disagreeing controller may only act on solicit");
    if (measured_.count(s)) throw ProtocolOrderViolation("controller already reported");

    std::int64_t p = cfg_.effective_p();
    bool liar_outcome =
        cfg_.scenario.kind == ScenarioKind::WrongOutcome && cfg_.scenario.liar == s;
    bool liar_key = cfg_.scenario.kind == ScenarioKind::WrongKey && cfg_.scenario.liar == s;

    Message msg;
    msg.sender = controller_name(s);
    msg.receiver = kBob;
    msg.s = s;

    switch (cfg_.scheme) {
        case SchemeKind::Classical: {
            std::int64_t c = shares_[s - 1].value.value();
            msg.kind = Message::Kind::ClassicalKey;
            msg.key = liar_key ? (c + 1) % p : c;
            break;
        }
        case SchemeKind::GhzMm: {
            MeasurementRecord rec =
                measure_site(*state_, site_c(s), bases_[s - 1].plus_minus(), rng_);
            rec.basis = "x-tilde";
            ++metrics_.controller_measurements;
            std::int64_t h = rec.outcome;  // 0 = +~, 1 = -~
            records_.push_back(std::move(rec));
            msg.kind = Message::Kind::AgreeReport;
            msg.outcome = liar_outcome ? 1 - h : h;
            break;
        }
        case SchemeKind::QuditPoly: {
            MeasurementRecord rec = measure_site_computational(*state_, site_c(s), rng_);
            ++metrics_.controller_measurements;
            std::int64_t digit = rec.outcome;
            records_.push_back(std::move(rec));
            msg.kind = Message::Kind::AgreeReport;
            std::int64_t reported = (liar_outcome || liar_key) ? (digit + 1) % p : digit;
            msg.outcome = reported;
            msg.key = reported;  // the measured digit is the key
            break;
        }
        case SchemeKind::EconQubit:
        case SchemeKind::EconBob: {
            BasisSpec basis = bases_[s - 1];
            // agreeing econ-bob controllers use the +/- basis
            bool plus_minus = cfg_.scheme == SchemeKind::EconBob && !forced_by_solicit;
            MeasurementRecord rec = measure_site(
                *state_, site_c(s), plus_minus ? basis.plus_minus() : basis, rng_);
            rec.basis = plus_minus ? "plus-minus-tilde" : "private-2x2";
            ++metrics_.controller_measurements;
            std::int64_t outcome = rec.outcome;
            records_.push_back(std::move(rec));
            msg.outcome = liar_outcome ? 1 - outcome : outcome;
            if (forced_by_solicit) {
                msg.kind = Message::Kind::SolicitReply;
            } else {
                std::int64_t c = shares_[s - 1].value.value();
                msg.kind = Message::Kind::AgreeReport;
                msg.key = liar_key ? (c + 1) % p : c;
            }
            break;
        }
    }

    measured_.insert(s);
    reported_outcomes_[s] = msg.outcome;
    if (msg.key >= 0) reported_keys_[s] = msg.key;
    post(std::move(msg));
}

void ProtocolRun::apply_alice_pauli(int l) {
    auto [i, j] = bell_[l - 1];
    std::array<Complex, 4> x{Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0)};
    std::array<Complex, 4> z{Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0)};
    if (j) {
        apply_single(*state_, site_b(l), x);
        ++metrics_.bob_alice_recovery_ops;
    }
    if (i) {
        apply_single(*state_, site_b(l), z);
        ++metrics_.bob_alice_recovery_ops;
    }
}

RunResult ProtocolRun::abort(const std::string& reason) {
    Message msg;
    msg.sender = kBob;
    msg.receiver = kAlice;
    msg.kind = Message::Kind::Abort;
    msg.reason = reason;
    post(std::move(msg));
    RunResult res = finalize();
    res.fidelity = 0.0;
    res.success = false;
    res.abort_reason = reason;
    return res;
}

RunResult ProtocolRun::finalize() {
    RunResult res;
    res.transcript = transcript_;
    res.records = records_;
    res.metrics = metrics_;
    return res;
}

RunResult ProtocolRun::bob_recover_and_finish() {
    int n = cfg_.n, m = cfg_.m;
    std::int64_t p = cfg_.effective_p();

    // channels whose B_l waits for controller phase recovery
    std::set<int> deferred;
    if (cfg_.scheme == SchemeKind::EconBob) {
        for (int c : channel_of_) deferred.insert(c);
    } else {
        deferred.insert(n);
    }
    for (int l = 1; l <= n; ++l)
        if (!deferred.count(l)) apply_alice_pauli(l);

    // step (ii)/(iii): key availability
    std::map<int, std::int64_t> keys = reported_keys_;
    if (cfg_.scenario.kind == ScenarioKind::BobStealsKeys) {
        for (int s : cfg_.scenario.members) keys[s] = shares_[s - 1].value.value();
    }
    if (cfg_.scheme == SchemeKind::GhzMm) {
        if (static_cast<int>(reported_outcomes_.size()) < m)
            return abort(kAbortInsufficientAgreement);
    } else if (static_cast<int>(keys.size()) < cfg_.k) {
        return abort(kAbortInsufficientAgreement);
    }

    std::vector<std::int64_t> full_keys(m, 0);
    if (cfg_.scheme != SchemeKind::GhzMm) {
        PrimeModulus pm(p);
        ShareSet partial;
        for (auto [s, c] : keys) partial.push_back({s, FieldElement(c, pm)});
        ShareSet full;
        try {
            full = reconstruct_keys(partial, *tcfg_);
        } catch (const InconsistentShares&) {
            return abort(kAbortInconsistentShares);
        }
        for (const Share& sh : full) full_keys[sh.index - 1] = sh.value.value();
    }

    // step (iv)/(v): solicits, with the collective cap at m - k
    if (uses_solicits(cfg_.scheme)) {
        for (int s = 1; s <= m; ++s) {
            if (measured_.count(s)) continue;
            Message sol;
            sol.sender = kBob;
            sol.receiver = controller_name(s);
            sol.kind = Message::Kind::Solicit;
            sol.s = s;
            post(std::move(sol));
            ++metrics_.solicits_sent;
            if (++solicit_count_ > m - cfg_.k) {
                Message ab;
                ab.sender = controller_name(s);
                ab.receiver = kBob;
                ab.kind = Message::Kind::Abort;
                ab.reason = kAbortSolicitCapExceeded;
                post(std::move(ab));
                return abort(kAbortSolicitCapExceeded);
            }
            controller_act(s, /*forced_by_solicit=*/true);
        }
    }

    // step (vi): phase recovery from controllers' outcomes
    switch (cfg_.scheme) {
        case SchemeKind::GhzMm: {
            std::int64_t parity = 0;
            for (auto [s, h] : reported_outcomes_) parity ^= h;
            if (parity) {
                std::array<Complex, 4> z{Complex(1, 0), Complex(0, 0), Complex(0, 0),
                                         Complex(-1, 0)};
                apply_single(*state_, site_b(n), z);
                ++metrics_.bob_controller_recovery_ops;
            }
            break;
        }
        case SchemeKind::QuditPoly:
        case SchemeKind::Classical: {
            double per_key = cfg_.scheme == SchemeKind::QuditPoly ? M_PI : 2.0 * M_PI;
            double theta = 0;
            for (int s = 1; s <= m; ++s)
                theta += per_key * static_cast<double>(full_keys[s - 1]) /
                         static_cast<double>(p);
            std::array<Complex, 4> d{Complex(1, 0), Complex(0, 0), Complex(0, 0),
                                     std::polar(1.0, -theta)};
            apply_single(*state_, site_b(n), d);
            ++metrics_.bob_controller_recovery_ops;
            break;
        }
        case SchemeKind::EconQubit: {
            for (int s = 1; s <= m; ++s) {
                auto d = econ_recovery_diag(reported_outcomes_.at(s), full_keys[s - 1], p);
                apply_single(*state_, site_b(n), d);
                ++metrics_.bob_controller_recovery_ops;
            }
            break;
        }
        case SchemeKind::EconBob: {
            for (int s = 1; s <= m; ++s) {
                int target = site_b(channel_of_[s - 1]);
                if (acting_.count(s)) {
                    // agreed: +~ needs nothing, -~ needs a single Z
                    if (reported_outcomes_.at(s) == 1) {
                        std::array<Complex, 4> z{Complex(1, 0), Complex(0, 0), Complex(0, 0),
                                                 Complex(-1, 0)};
                        apply_single(*state_, target, z);
                        ++metrics_.bob_controller_recovery_ops;
                    }
                } else {
                    auto d = econ_recovery_diag(reported_outcomes_.at(s), full_keys[s - 1], p);
                    apply_single(*state_, target, d);
                    ++metrics_.bob_controller_recovery_ops;
                }
            }
            break;
        }
    }

    // step (vii): Paulis on the deferred channels
    for (int l : deferred) apply_alice_pauli(l);

    RunResult res = finalize();
    std::vector<int> b_sites;
    for (int l = 1; l <= n; ++l) b_sites.push_back(site_b(l));
    res.fidelity = fidelity_on_sites(*state_, b_sites, input_);
    res.success = res.fidelity > 1.0 - 1e-9;
    if (cfg_.scenario.kind == ScenarioKind::ScheduleViolation)
        res.flags.push_back(kFlagScheduleViolation);
    return res;
}

RunResult ProtocolRun::run() {
    if (!setup_done_) dealer_setup();
    prepare_shared_state();
    alice_run();
    std::vector<int> order(acting_.begin(), acting_.end());
    for (int s : order) controller_act(s);
    return bob_recover_and_finish();
}

RunResult run_protocol(const RunConfig& cfg) { return ProtocolRun(cfg).run(); }

double expected_controller_recovery_ops(const RunConfig& cfg, const ShareSet& shares) {
    if (cfg.scheme != SchemeKind::EconBob)
        throw WrongScheme("expectation defined for econ-bob only");
    double p = static_cast<double>(cfg.effective_p());
    double total = 0;
    for (int s : cfg.agree) {
        double c = static_cast<double>(shares.at(s - 1).value.value());
        double sn = std::sin(M_PI * c / p);
        total += sn * sn;
    }
    total += static_cast<double>(cfg.m - static_cast<int>(cfg.agree.size()));
    return total;
}

}  // namespace ctqt
