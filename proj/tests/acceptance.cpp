// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Settings follow the documented acceptance sweep (M = 127, delta = 2^-10).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mildlab/parallel.hpp"
#include "mildlab/run.hpp"
#include "mildlab/verify.hpp"

using namespace mildlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

const Grid kGrid(127);
const HeatSemigroup& heat() {
    static const HeatSemigroup sg(kGrid, 1.0);
    return sg;
}

GridFunction sine_datum() {
    return GridFunction::from_function(kGrid, [](double x) { return std::sin(std::numbers::pi * x); });
}

StudyContext context(std::size_t seeds, std::vector<double> schedule, double cauchy_tol, double q, double r,
                     std::size_t workers) {
    SolverConfig solver;
    solver.q = q;
    solver.r = r;
    solver.lambda_schedule = std::move(schedule);
    solver.cauchy_tol = cauchy_tol;
    return StudyContext{heat(),
                        DiffusionSpec::from_power_law(kGrid.size(), 1.0, 2.0),
                        1.0,
                        1.0 / 1024.0,
                        seed_range(7, seeds),
                        solver,
                        sine_datum(),
                        2.0,
                        workers};
}

// Collapses reports into one outcome, naming the first failure.
Outcome summarize(const std::vector<StudyReport>& reports) {
    std::ostringstream os;
    bool ok = true;
    for (const auto& r : reports) {
        if (r.passed()) continue;
        ok = false;
        os << r.name << " " << to_string(r.verdict);
        for (const auto& t : r.thresholds)
            if (!t.passed) {
                os << " [" << t.name << ": " << t.measured << " " << t.relation << " " << t.limit << "]";
                break;
            }
        for (const auto& n : r.notes) os << " (" << n << ")";
        os << "; ";
    }
    if (ok) os << reports.size() << " report(s) pass";
    return {ok, os.str()};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        files[fs::relative(e.path(), root).generic_string()] = os.str();
    }
    return files;
}

}  // namespace

int main() {
    const std::size_t workers = default_workers();
    const auto drifts = test_drifts();
    const auto cubic = MonotoneGraph::cubic();
    const auto sign = MonotoneGraph::sign();
    const auto sign_lin = MonotoneGraph::sign_plus_linear();
    const double root_tol = 1e-12;

    struct Criterion {
        std::string name;
        double limit_seconds;  // 0: no runtime limit
        std::function<Outcome()> check;
    };
    std::vector<Criterion> criteria;

    criteria.push_back({"scalar identities, 1e4 samples per drift", 10.0, [&] {
        std::vector<StudyReport> reps;
        for (const auto& f : drifts) reps.push_back(scalar_identity_check(f, 10000, 1, root_tol));
        return summarize(reps);
    }});
    criteria.push_back({"closed-form resolvents", 5.0, [&] {
        return summarize({closed_form_check(10000, 2, root_tol)});
    }});
    criteria.push_back({"inequality suites, 1e5 samples", 10.0, [&] {
        return summarize({inequality_check(100000, 3)});
    }});
    criteria.push_back({"semigroup axioms at M = 127", 30.0, [&] {
        return summarize({semigroup_axiom_check(heat(), 1000, 4)});
    }});
    criteria.push_back({"noise exactness, 2000 paths", 60.0, [&] {
        return summarize({noise_exactness_check(heat(), 2000, 5, workers)});
    }});

    // The a-priori study checks both explicit constants on one sweep.
    std::vector<StudyReport> apriori;
    auto run_apriori = [&] {
        if (!apriori.empty()) return;
        const auto ctx = context(20, geometric_schedule(0.25, 7), 1e-3, 2.0, 2.0, workers);
        for (const auto& f : {cubic, sign, sign_lin}) apriori.push_back(apriori_bound_study(f, {1.5, 2.0, 3.0, 4.0}, ctx));
    };
    auto constant_outcome = [&](const std::string& tag) {
        std::ostringstream os;
        bool ok = true;
        std::size_t checked = 0;
        for (const auto& r : apriori)
            for (const auto& t : r.thresholds) {
                if (t.name.find(tag) == std::string::npos) continue;
                ++checked;
                if (!t.passed) {
                    ok = false;
                    os << r.name << " [" << t.name << ": " << t.measured << "] ";
                }
            }
        if (ok) os << checked << " (drift, q) cases, relative excess <= 1e-10";
        return Outcome{ok && checked > 0, os.str()};
    };
    criteria.push_back({"explicit constant 4, drifts {x^3, sgn, sgn+x}, q in {1.5, 2, 3}, 20 seeds", 300.0, [&] {
        run_apriori();
        return constant_outcome("constant-4");
    }});
    criteria.push_back({"explicit constant 2, q in {2, 4}", 0.0, [&] {
        run_apriori();
        return constant_outcome("constant-2");
    }});

    criteria.push_back({"Cauchy rates, x^3 at q = 2 and x|x| at q = 1.5, 10 seeds", 600.0, [&] {
        const auto sched = geometric_schedule(0.25, 7);
        const auto a = cauchy_rate_study(cubic, 2.0, context(10, sched, 1e-30, 2.0, 2.0, workers));
        const auto b = cauchy_rate_study(MonotoneGraph::odd_power(2.0), 1.5, context(10, sched, 1e-30, 1.5, 1.5, workers));
        auto o = summarize({a, b});
        std::ostringstream os;
        os << o.detail << "; min slopes " << a.fitted.at("min_slope") << ", " << b.fitted.at("min_slope");
        return Outcome{o.passed, os.str()};
    }});
    criteria.push_back({"contraction of paired runs, 20 seeds", 0.0, [&] {
        const auto ctx = context(20, geometric_schedule(0.25, 7), 1e-3, 2.0, 2.0, workers);
        const auto other = GridFunction::from_function(kGrid, [](double x) { return -0.5 * std::sin(2.0 * std::numbers::pi * x); });
        return summarize({contraction_study(cubic, other, ctx), contraction_study(sign_lin, other, ctx)});
    }});
    criteria.push_back({"linear-drift oracle, c in {1, 5}", 0.0, [&] {
        const auto ctx = context(1, geometric_schedule(0.25, 7), 1e-3, 2.0, 2.0, workers);
        const std::vector<double> deltas = {1.0 / 512.0, 1.0 / 1024.0, 1.0 / 2048.0};
        return summarize({linear_oracle_study(1.0, deltas, 11, ctx), linear_oracle_study(5.0, deltas, 11, ctx)});
    }});
    criteria.push_back({"mild identity and inclusion", 0.0, [&] {
        std::vector<StudyReport> reps;
        const auto cont = context(2, geometric_schedule(0.25, 17), 2e-6, 2.0, 2.0, workers);
        for (std::size_t i = 0; i < 4; ++i) reps.push_back(mild_identity_study(drifts[i], 1e-4, 0.999, cont));
        const auto jump = context(2, geometric_schedule(0.25, 13), 1e-4, 2.0, 2.0, workers);
        reps.push_back(mild_identity_study(sign, 1e-3, 0.99, jump));
        reps.push_back(mild_identity_study(sign_lin, 1e-3, 0.99, jump));
        return summarize(reps);
    }});
    criteria.push_back({"L1 convergence for the sign drift", 300.0, [&] {
        const auto ctx = context(2, geometric_schedule(0.25, 13), 1e-3, 1.0, 1.0, workers);
        return summarize({l1_convergence_study(sign, ctx)});
    }});
    criteria.push_back({"auxiliary lemmas", 0.0, [&] {
        const auto forcing = [](double t, double x) { return std::cos(4.0 * t) * std::sin(2.0 * std::numbers::pi * x); };
        return summarize({bernoulli_study(1000, 1),
                          chain_rule_study(2.0, heat(), forcing, sine_datum(), 1.0, 1.0 / 256.0),
                          chain_rule_study(3.0, heat(), forcing, sine_datum(), 1.0, 1.0 / 256.0),
                          eiconv_demo(1024)});
    }});
    criteria.push_back({"determinism across repeats and worker counts", 0.0, [&] {
        const auto cfg = parse_config(R"({
          "M": 63, "delta": 0.00390625, "seeds": {"count": 3},
          "lambda": {"base": 0.25, "levels": 5}, "output": "det",
          "studies": {"cauchy": {}, "apriori": {}, "contraction": {}}
        })");
        const fs::path root = fs::temp_directory_path() / "mildlab_acceptance_determinism";
        std::vector<std::map<std::string, std::string>> snaps;
        for (std::size_t w : {std::size_t{1}, std::size_t{1}, std::max<std::size_t>(workers, 4)}) {
            fs::remove_all(root);
            RunOptions opt;
            opt.workers = w;
            opt.output_root = root;
            run(cfg, "sample-noise", "", opt);
            run(cfg, "solve", "", opt);
            run(cfg, "study", "all", opt);
            run(cfg, "check-invariants", "", opt);
            snaps.push_back(snapshot(root));
        }
        fs::remove_all(root);
        const bool same = snaps[0] == snaps[1] && snaps[0] == snaps[2];
        std::ostringstream os;
        os << snaps[0].size() << " files compared over 3 runs (workers 1, 1, "
           << std::max<std::size_t>(workers, 4) << ")";
        return Outcome{same && !snaps[0].empty(), os.str()};
    }});

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double limit = criteria[i].limit_seconds;
        if (limit > 0.0 && s > limit) {
            o.passed = false;
            o.detail += "; over the runtime limit";
        }
        if (!o.passed) ++failures;
        char budget[32] = "";
        if (limit > 0.0) std::snprintf(budget, sizeof budget, " of %.0f s", limit);
        std::printf("criterion %2zu: %s  %s: %s (%.1f s%s)\n", i + 1, o.passed ? "PASS" : "FAIL",
                    criteria[i].name.c_str(), o.detail.c_str(), s, budget);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
