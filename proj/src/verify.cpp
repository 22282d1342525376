#include "ctqt/verify.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ctqt/field.hpp"
#include "ctqt/protocol.hpp"
#include "ctqt/report.hpp"
#include "ctqt/sharing.hpp"
#include "ctqt/sim.hpp"

namespace ctqt {

namespace {

struct Harness {
    std::ostream& out;
    std::uint64_t seed;
    int failures = 0;

    void check(const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (ok) {
            out << "  ok   " << name << "\n";
        } else {
            ++failures;
            out << "  FAIL " << name << " (seed=" << seed << ")";
            if (!detail.empty()) out << " " << detail;
            out << "\n";
        }
    }
};

void field_suite(Harness& h) {
    for (std::int64_t p : {2, 3, 5, 7, 11}) {
        h.check("field axioms GF(" + std::to_string(p) + ")", [p](std::string& detail) {
            PrimeModulus pm(p);
            for (std::int64_t a = 0; a < p; ++a)
                for (std::int64_t b = 0; b < p; ++b) {
                    FieldElement fa(a, pm), fb(b, pm);
                    if ((fa + fb).value() != (a + b) % p ||
                        (fa * fb).value() != (a * b) % p) {
                        detail = "arithmetic mismatch at a=" + std::to_string(a) +
                                 " b=" + std::to_string(b);
                        return false;
                    }
                    if (b != 0 && ((fa / fb) * fb) != fa) {
                        detail = "division round-trip failed";
                        return false;
                    }
                    for (std::int64_t c = 0; c < p; ++c) {
                        FieldElement fc(c, pm);
                        if (fa * (fb + fc) != fa * fb + fa * fc) {
                            detail = "distributivity failed";
                            return false;
                        }
                    }
                }
            return true;
        });
    }
    h.check("solve_unique round-trip", [&h](std::string& detail) {
        RngStream rng(RngStream::derive(h.seed, 1));
        for (int trial = 0; trial < 200; ++trial) {
            std::int64_t p = std::vector<std::int64_t>{5, 7, 11}[rng.uniform_int(3)];
            PrimeModulus pm(p);
            int nn = 1 + static_cast<int>(rng.uniform_int(5));
            FieldMatrix a(nn, nn, pm);
            for (int i = 0; i < nn; ++i)
                for (int j = 0; j < nn; ++j) a.set(i, j, rng.uniform_int(p));
            if (a.rank() < nn) continue;
            FieldVector x;
            for (int i = 0; i < nn; ++i) x.emplace_back(rng.uniform_int(p), pm);
            FieldVector b = a.mat_vec_mul(x);
            FieldVector got = a.solve_unique(b);
            for (int i = 0; i < nn; ++i)
                if (got[i] != x[i]) {
                    detail = "trial " + std::to_string(trial);
                    return false;
                }
        }
        return true;
    });
    h.check("vandermonde threshold condition", [](std::string& detail) {
        for (std::int64_t p : {5, 7, 11})
            for (int m = 1; m <= 5; ++m)
                for (int k = 1; k <= m; ++k) {
                    PrimeModulus pm(p);
                    FieldVector pts;
                    for (int s = 0; s < m; ++s) pts.emplace_back(s, pm);
                    if (!is_threshold_matrix(vandermonde(m, k, pts), k)) {
                        detail = "p=" + std::to_string(p) + " m=" + std::to_string(m) +
                                 " k=" + std::to_string(k);
                        return false;
                    }
                }
        return true;
    });
}

void sharing_suite(Harness& h) {
    h.check("reconstruct after generate", [&h](std::string& detail) {
        RngStream rng(RngStream::derive(h.seed, 2));
        for (int trial = 0; trial < 200; ++trial) {
            int m = 2 + static_cast<int>(rng.uniform_int(4));
            int k = 1 + static_cast<int>(rng.uniform_int(m));
            ThresholdConfig cfg = ThresholdConfig::standard(k, m);
            std::int64_t p = cfg.p.value();
            SecretVector x;
            for (int i = 0; i < k; ++i) x.emplace_back(rng.uniform_int(p), cfg.p);
            ShareSet shares = generate_shares(x, cfg);
            ShareSet partial;
            for (int i = 0; i < k; ++i) partial.push_back(shares[static_cast<std::size_t>(
                rng.uniform_int(m))]);
            // dedupe by index, topping up from the front
            ShareSet unique;
            std::vector<bool> used(static_cast<std::size_t>(m) + 1, false);
            for (const Share& s : partial)
                if (!used[static_cast<std::size_t>(s.index)]) {
                    used[static_cast<std::size_t>(s.index)] = true;
                    unique.push_back(s);
                }
            for (const Share& s : shares) {
                if (static_cast<int>(unique.size()) == k) break;
                if (!used[static_cast<std::size_t>(s.index)]) {
                    used[static_cast<std::size_t>(s.index)] = true;
                    unique.push_back(s);
                }
            }
            if (reconstruct_keys(unique, cfg) != shares) {
                detail = "trial " + std::to_string(trial);
                return false;
            }
        }
        return true;
    });
    h.check("perfect secrecy (2,3) over GF(3)", [](std::string& detail) {
        ThresholdConfig cfg = ThresholdConfig::standard(2, 3, PrimeModulus(3));
        for (int holder = 1; holder <= 3; ++holder)
            for (std::int64_t c = 0; c < 3; ++c) {
                ShareSet partial{{holder, FieldElement(c, cfg.p)}};
                auto secrets = consistent_secrets(partial, cfg);
                for (int other = 1; other <= 3; ++other) {
                    if (other == holder) continue;
                    std::vector<int> count(3, 0);
                    for (const SecretVector& x : secrets) {
                        ShareSet sh = generate_shares(x, cfg);
                        ++count[static_cast<std::size_t>(sh[static_cast<std::size_t>(
                            other - 1)].value.value())];
                    }
                    if (count[0] != count[1] || count[1] != count[2]) {
                        detail = "holder=" + std::to_string(holder) +
                                 " other=" + std::to_string(other);
                        return false;
                    }
                }
            }
        return true;
    });
}

void sim_suite(Harness& h) {
    h.check("bell vectors resolve the computational basis", [](std::string& detail) {
        // |x,y> = (1/sqrt 2) sum_i (-1)^{x i} |B_{i, x xor y}>
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                std::array<Complex, 4> acc{};
                for (int i = 0; i < 2; ++i) {
                    auto b = bell_vector(i, x ^ y);
                    double sign = (x && i) ? -1.0 : 1.0;
                    for (int t = 0; t < 4; ++t)
                        acc[static_cast<std::size_t>(t)] +=
                            sign / std::sqrt(2.0) * b[static_cast<std::size_t>(t)];
                }
                for (int t = 0; t < 4; ++t) {
                    double want = (t == 2 * x + y) ? 1.0 : 0.0;
                    if (std::abs(acc[static_cast<std::size_t>(t)] - want) > 1e-12) {
                        detail = "x=" + std::to_string(x) + " y=" + std::to_string(y);
                        return false;
                    }
                }
            }
        return true;
    });
    h.check("random circuits preserve the norm", [&h](std::string& detail) {
        RngStream rng(RngStream::derive(h.seed, 3));
        Register reg({2, 2, 3, 2}, {"q0", "q1", "d2", "q3"});
        StateVector st(reg);
        for (int step = 0; step < 50; ++step) {
            int site = static_cast<int>(rng.uniform_int(4));
            if (reg.dim(site) == 2) {
                apply_single(st, site, BasisSpec::haar(rng).u);
            } else {
                std::vector<Complex> phases;  // 2 x 3 joint phases on (q0, d2)
                for (int i = 0; i < 6; ++i)
                    phases.push_back(std::polar(1.0, rng.uniform()));
                apply_two_diag(st, 0, site, phases);
            }
            if (std::abs(st.norm2() - 1.0) > 1e-9) {
                detail = "step " + std::to_string(step);
                return false;
            }
        }
        return true;
    });
    h.check("measurement distributions are normalized", [&h](std::string& detail) {
        RngStream rng(RngStream::derive(h.seed, 4));
        Register reg({2, 2, 2}, {"a", "b", "c"});
        StateVector st(reg);
        for (int s = 0; s < 3; ++s) apply_single(st, s, BasisSpec::haar(rng).u);
        for (int s = 0; s < 3; ++s) {
            auto dist = outcome_distribution(st, s, BasisSpec::haar(rng));
            double total = 0;
            for (double q : dist) total += q;
            if (std::abs(total - 1.0) > 1e-9) {
                detail = "site " + std::to_string(s);
                return false;
            }
        }
        return true;
    });
}

void protocol_suite(Harness& h) {
    for (SchemeKind scheme : {SchemeKind::GhzMm, SchemeKind::QuditPoly, SchemeKind::Classical,
                              SchemeKind::EconQubit, SchemeKind::EconBob}) {
        h.check("honest run reaches fidelity 1 (" + to_string(scheme) + ")",
                [&h, scheme](std::string& detail) {
                    RunConfig cfg;
                    cfg.scheme = scheme;
                    cfg.n = 2;
                    cfg.m = 3;
                    cfg.k = scheme == SchemeKind::GhzMm ? 3 : 2;
                    cfg.agree = {1, 3};
                    if (scheme == SchemeKind::GhzMm) cfg.agree = {1, 2, 3};
                    if (scheme == SchemeKind::EconBob) cfg.channels = {1, 2, 2};
                    cfg.seed = RngStream::derive(h.seed, 5);
                    RunResult res = run_protocol(cfg);
                    if (res.fidelity <= 1.0 - 1e-9) {
                        detail = "fidelity=" + std::to_string(res.fidelity);
                        return false;
                    }
                    return true;
                });
    }
    h.check("transcripts replay bit-for-bit from the seed", [&h](std::string& detail) {
        RunConfig cfg;
        cfg.scheme = SchemeKind::EconQubit;
        cfg.n = 1;
        cfg.m = 4;
        cfg.k = 2;
        cfg.agree = {2, 4};
        cfg.seed = RngStream::derive(h.seed, 6);
        RunResult a = run_protocol(cfg);
        RunResult b = run_protocol(cfg);
        if (transcript_to_string(a.transcript) != transcript_to_string(b.transcript) ||
            a.fidelity != b.fidelity) {
            detail = "transcripts differ";
            return false;
        }
        return true;
    });
    h.check("controller marginals carry no input information", [&h](std::string& detail) {
        std::uint64_t seed = RngStream::derive(h.seed, 7);
        RngStream inputs(RngStream::derive(h.seed, 8));
        std::vector<double> reference;
        for (int trial = 0; trial < 5; ++trial) {
            RunConfig cfg;
            cfg.scheme = SchemeKind::EconQubit;
            cfg.n = 1;
            cfg.m = 2;
            cfg.k = 2;
            cfg.agree = {1, 2};
            cfg.seed = seed;
            cfg.input.resize(2);
            double norm = 0;
            for (Complex& a : cfg.input) {
                a = Complex(inputs.gaussian(), inputs.gaussian());
                norm += std::norm(a);
            }
            for (Complex& a : cfg.input) a /= std::sqrt(norm);
            ProtocolRun run(cfg);
            run.dealer_setup();
            run.prepare_shared_state();
            auto dist = outcome_distribution(run.state(), run.site_c(1), run.bases()[0]);
            if (trial == 0) {
                reference = dist;
            } else if (std::abs(dist[0] - reference[0]) > 1e-9) {
                detail = "marginal moved by " + std::to_string(dist[0] - reference[0]);
                return false;
            }
        }
        return true;
    });
}

}  // namespace

int verify_suite(const std::string& suite, std::ostream& out, std::uint64_t seed) {
    Harness h{out, seed};
    bool all = suite == "all";
    bool known = all;
    if (all || suite == "field") { out << "field:\n"; field_suite(h); known = true; }
    if (all || suite == "sharing") { out << "sharing:\n"; sharing_suite(h); known = true; }
    if (all || suite == "sim") { out << "sim:\n"; sim_suite(h); known = true; }
    if (all || suite == "protocol") { out << "protocol:\n"; protocol_suite(h); known = true; }
    if (!known) throw ParseError("unknown suite: " + suite);
    out << (h.failures == 0 ? "all checks passed\n"
                            : std::to_string(h.failures) + " check(s) failed\n");
    return h.failures;
}

}  // namespace ctqt
