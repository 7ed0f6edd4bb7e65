// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msl/analysis.hpp"
#include "msl/campaign.hpp"
#include "msl/propagator.hpp"

using namespace msl;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string failures_of(const CampaignSummary& s) {
    if (s.failures.empty()) return "0 failures";
    return std::to_string(s.failures.size()) + " failures, first seed " + std::to_string(s.failures.front().seed) +
           ": " + s.failures.front().message;
}

Outcome classical_reduction() {
    const Interval iv{0.0, 7.0};
    const auto p = std::make_shared<const Problem>(0.5, PiecewiseMeasure::uniform(iv, 1.0), PiecewiseMeasure::uniform(iv, -1.0));
    const Solution u = solve_ivp(p, pi / 2, 1.0, 0.0);
    double err = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        const double x = 7.0 * k / 1001.0;
        err = std::max(err, std::abs(u.evaluate(x).u - std::sin(x)));
    }
    const auto z = find_sign_changes(u);
    bool zeros_ok = z.size() == 2 && std::abs(z[0].position - pi) <= 1e-10 && std::abs(z[1].position - 2 * pi) <= 1e-10;
    return {err <= 1e-10 && zeros_ok,
            "sup error " + sci(err) + ", " + std::to_string(z.size()) + " zeros" +
                (z.size() == 2 ? " at pi" + std::string(zeros_ok ? "" : " (off)") + " and 2pi" : "")};
}

Outcome jump_algebra() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    double identity_err = 0.0, inverse_err = 0.0;
    std::size_t tuples = 0, inverses = 0;
    while (tuples < 100000) {
        const double r = uniform(0.0, 1.0);
        const double da = uniform(0.0, 3.0), db = uniform(-3.0, 3.0);
        const double theta_1mr = 1.0 - (1.0 - r) * (1.0 - r) * da * db;
        if (std::abs(theta_1mr) < 1e-3) continue;
        State left{uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
        if (left.max_norm() == 0.0) continue;
        // Scale the left limit so the whole record is unit-scale.
        AtomCrossing c = cross_atom(r, da, db, left);
        left = (1.0 / std::max({left.max_norm(), c.mid.max_norm(), c.right.max_norm()})) * left;
        c = cross_atom(r, da, db, left);
        ++tuples;
        identity_err = std::max({identity_err, (c.mid - (r * left + (1.0 - r) * c.right)).max_norm(),
                                 (c.right - jump_right(r, da, db, c.mid)).max_norm(),
                                 (left - jump_left(r, da, db, c.mid)).max_norm()});
        // The inverse crossing exists when theta_r does not vanish either.
        if (std::abs(1.0 - r * r * da * db) >= 1e-3) {
            const AtomCrossingLeftward back = cross_atom_leftward(r, da, db, c.right);
            inverse_err = std::max({inverse_err, (back.left - left).max_norm(), (back.mid - c.mid).max_norm()});
            ++inverses;
        }
    }
    return {identity_err <= 1e-13 && inverse_err <= 1e-12,
            std::to_string(tuples) + " tuples, identity error " + sci(identity_err) + ", inverse error " +
                sci(inverse_err) + " over " + std::to_string(inverses) + " inversions"};
}

Outcome oracle_equivalence() {
    const std::size_t n = 200;
    const std::uint64_t seed = 42;
    const CampaignOptions opts;
    std::size_t max_atoms = 0, max_pieces = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Instance inst = random_instance(instance_seed(seed, i), opts.instance, CampaignMode::oracle);
        max_atoms = std::max(max_atoms, inst.problem->jumps().size());
        max_pieces = std::max(max_pieces, inst.problem->pieces().size());
    }
    const CampaignSummary s = run_campaign(CampaignMode::oracle, n, seed, opts);
    const bool sized = max_atoms <= 10 && max_pieces <= 12;
    return {s.pass() && sized && s.checks.at("onestep") == n && s.checks.at("picard") == n,
            "onestep max " + sci(s.maxima.at("onestep")) + ", picard max " + sci(s.maxima.at("picard")) +
                ", <= " + std::to_string(max_atoms) + " atoms, <= " + std::to_string(max_pieces) + " pieces, " +
                failures_of(s)};
}

Outcome isolation() {
    const CampaignSummary s = run_campaign(CampaignMode::isolation, 500, 42);
    std::size_t points = 0;
    for (const auto& [name, count] : s.checks) points += count;
    return {s.pass(), std::to_string(points) + " checks, " + failures_of(s)};
}

Outcome wronskian_suite() {
    const CampaignSummary s = run_campaign(CampaignMode::wronskian, 200, 42);
    std::string detail;
    for (const char* k : {"constancy", "relation", "product", "series"}) {
        detail += std::string(k) + " " + sci(s.maxima.count(k) ? s.maxima.at(k) : 0.0) + ", ";
    }
    return {s.pass() && s.checks.count("constancy") && s.checks.count("relation"), detail + failures_of(s)};
}

Outcome theorem_campaign(CampaignMode mode, const std::vector<std::string>& ids, const char* lemma) {
    const CampaignSummary s = run_campaign(mode, 500, 42);
    std::size_t least = SIZE_MAX;
    std::string least_id;
    for (const std::string& id : ids) {
        const std::size_t c = s.clause_counts.count(id) ? s.clause_counts.at(id) : 0;
        if (c < least) {
            least = c;
            least_id = id;
        }
    }
    const std::size_t lemmas = s.checks.count(lemma) ? s.checks.at(lemma) : 0;
    return {s.pass() && least >= 20 && lemmas > 0,
            "least exercised " + least_id + " x" + std::to_string(least) + ", " + std::to_string(lemmas) + " " + lemma +
                " checks, " + std::to_string(s.warnings) + " warnings, " + failures_of(s)};
}

Outcome hypothesis_gating(const std::string& cli, const std::string& data, const std::string& tmp) {
    struct Case {
        const char* file;
        const char* atom;
    };
    const std::vector<Case> cases{{"theta_r_zero.json", "x=-0.75"},
                                  {"theta_1mr_zero.json", "x=1.25"},
                                  {"theta_zero.json", "x=0.5"},
                                  {"omega_zero.json", "x=2"},
                                  {"omega1_zero.json", "x=2.5"}};
    std::string bad;
    for (const Case& c : cases) {
        std::string previous;
        for (int round = 0; round < 2; ++round) {
            const std::string out = tmp + "/gate.out", err = tmp + "/gate.err";
            const int code = run(cli + " check --config " + data + "/" + c.file + " > " + out + " 2> " + err);
            const std::string text = read_file(out) + read_file(err);
            if (code != 2 || read_file(err).find(c.atom) == std::string::npos || (round == 1 && text != previous)) {
                bad += std::string(" ") + c.file;
            }
            previous = text;
        }
    }
    const int ok_code = run(cli + " check --config " + data + "/sine.json > " + tmp + "/gate.out 2>&1");
    if (ok_code != 0) bad += " sine.json";
    return {bad.empty(), bad.empty() ? std::to_string(cases.size()) + " degenerate configs rejected with exit 2 naming the atom"
                                     : "unexpected result for" + bad};
}

Outcome cli_determinism(const std::string& cli, const std::string& tmp) {
    std::string bad;
    for (const char* mode : {"isolation", "separation", "comparison", "wronskian", "oracle"}) {
        const std::string a = tmp + "/verify_a.json", b = tmp + "/verify_b.json";
        const std::string base = cli + " verify --mode " + mode + " --n 100 --seed 7 --output ";
        const int ca = run(base + a), cb = run(base + b);
        const std::string ta = read_file(a), tb = read_file(b);
        if (ca != 0 || cb != 0 || ta.empty() || ta != tb) bad += std::string(" ") + mode;
    }
    return {bad.empty(), bad.empty() ? "byte-identical reports for all five modes" : "differences in" + bad};
}

}  // namespace

int main() {
    const std::string cli = MSL_CLI_PATH;
    const std::string data = MSL_TEST_DATA_DIR;
    const std::string tmp = MSL_ACCEPTANCE_TMP;

    struct Criterion {
        const char* name;
        double limit;  // seconds; 0 for none
        std::function<Outcome()> body;
    };
    const std::vector<Criterion> criteria{
        {"classical reduction", 0.1, classical_reduction},
        {"jump algebra", 1.0, jump_algebra},
        {"oracle equivalence", 60.0, oracle_equivalence},
        {"isolation and classification", 60.0, isolation},
        {"Wronskian suite", 30.0, wronskian_suite},
        {"separation campaign", 120.0,
         [] { return theorem_campaign(CampaignMode::separation, instance_targets(CampaignMode::separation), "flip-wronskian"); }},
        {"comparison campaign", 120.0,
         [] { return theorem_campaign(CampaignMode::comparison, instance_targets(CampaignMode::comparison), "flip-modified"); }},
        {"hypothesis gating", 0.0, [&] { return hypothesis_gating(cli, data, tmp); }},
        {"CLI determinism", 0.0, [&] { return cli_determinism(cli, tmp); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit > 0.0 && secs >= c.limit) {
            o.pass = false;
            o.detail += ", over the " + sci(c.limit) + " s limit";
        }
        std::printf("%s [%zu] %s: %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
        failed += !o.pass;
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
