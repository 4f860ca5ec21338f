#include "mildlab/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <system_error>

#include "mildlab/errors.hpp"
#include "mildlab/parallel.hpp"

namespace mildlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void append_number(std::string& out, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

/// time,node,value rows of a trajectory.
std::string trajectory_csv(const std::vector<GridFunction>& traj, const TimeGrid& time) {
    std::string out = "time,node,value\n";
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const double t = time.time(n);
        const Grid& grid = traj[n].grid();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            append_number(out, t);
            out += ',';
            append_number(out, grid.node(i));
            out += ',';
            append_number(out, traj[n][i]);
            out += '\n';
        }
    }
    return out;
}

std::string verdict_summary(const std::vector<StudyReport>& reports) {
    if (reports.empty()) return to_string(Verdict::inconclusive);
    bool inconclusive = false;
    for (const auto& r : reports) {
        if (r.verdict == Verdict::fail) return to_string(Verdict::fail);
        inconclusive = inconclusive || r.verdict == Verdict::inconclusive;
    }
    return to_string(inconclusive ? Verdict::inconclusive : Verdict::pass);
}

std::string normalize_study_name(std::string name) {
    for (char& c : name)
        if (c == '-') c = '_';
    return name;
}

const StudyOverrides* overrides_for(const RunConfig& cfg, const std::string& name) {
    const auto& s = cfg.studies;
    if (name == "cauchy" && s.cauchy) return &s.cauchy->overrides;
    if (name == "l1" && s.l1) return &s.l1->overrides;
    if (name == "apriori" && s.apriori) return &s.apriori->overrides;
    if (name == "contraction" && s.contraction) return &s.contraction->overrides;
    if (name == "linear_oracle" && s.linear_oracle) return &s.linear_oracle->overrides;
    if (name == "mild_identity" && s.mild_identity) return &s.mild_identity->overrides;
    if (name == "moments" && s.moments) return &s.moments->overrides;
    if (name == "propagation" && s.propagation) return &s.propagation->overrides;
    if (name == "contraction_extension" && s.contraction_extension) return &s.contraction_extension->overrides;
    return nullptr;
}

bool section_present(const RunConfig& cfg, const std::string& name) {
    const auto& s = cfg.studies;
    if (name == "chain_rule") return s.chain_rule.has_value();
    if (name == "bernoulli") return s.bernoulli.has_value();
    if (name == "eiconv") return s.eiconv.has_value();
    return overrides_for(cfg, name) != nullptr;
}

std::string label_number(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

class Manifest {
public:
    Manifest(const RunConfig& cfg, fs::path dir) : dir_(std::move(dir)), digest_(config_digest(cfg)) {
        const fs::path file = dir_ / "manifest.json";
        std::ifstream in(file);
        if (in) {
            try {
                json old = json::parse(in);
                if (old.value("config_digest", "") == digest_) doc_ = std::move(old);
            } catch (const json::exception&) {
                // An unreadable manifest is replaced.
            }
        }
        if (doc_.is_null()) doc_ = {{"config_digest", digest_}, {"config", cfg.normalized}, {"runs", json::object()}};
    }

    void record(const std::string& key, const json& entry) { doc_["runs"][key] = entry; }

    void save() const { write_atomic(dir_ / "manifest.json", doc_.dump(2) + "\n"); }

private:
    fs::path dir_;
    std::string digest_;
    json doc_;
};

json write_reports(const std::vector<StudyReport>& reports, const fs::path& base, const fs::path& run_dir,
                   std::ostream* log) {
    json listing = json::array();
    for (const auto& rep : reports) {
        const fs::path dir = base / rep.name;
        write_atomic(dir / "report.json", to_json(rep).dump(2) + "\n");
        write_atomic(dir / "series.csv", series_csv(rep));
        listing.push_back({{"name", rep.name},
                           {"verdict", to_string(rep.verdict)},
                           {"report", fs::relative(dir / "report.json", run_dir).generic_string()},
                           {"series", fs::relative(dir / "series.csv", run_dir).generic_string()}});
        if (log) {
            *log << rep.name << ": " << to_string(rep.verdict) << '\n';
            for (const auto& t : rep.thresholds)
                if (!t.passed)
                    *log << "  failed: " << t.name << " (" << t.measured << ' ' << t.relation << ' ' << t.limit << ")\n";
            for (const auto& n : rep.notes) *log << "  note: " << n << '\n';
        }
    }
    return listing;
}

}  // namespace

fs::path run_directory(const RunConfig& config, const RunOptions& options) {
    const fs::path out(config.output);
    if (out.is_absolute()) return out;
    if (options.output_root) return *options.output_root / out;
    if (const char* root = std::getenv(kOutputRootVariable); root && *root) return fs::path(root) / out;
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string());
    }
}

StudyContext make_context(const RunConfig& config, const StudyOverrides& overrides, std::size_t workers) {
    HeatSemigroup sg(Grid(config.M), config.nu);
    SolverConfig solver = config.solver;
    if (overrides.lambda_schedule) solver.lambda_schedule = *overrides.lambda_schedule;
    if (overrides.cauchy_tol) solver.cauchy_tol = *overrides.cauchy_tol;
    GridFunction u0 = config.initial.build(sg.grid());
    StudyContext ctx{std::move(sg), config.noise, config.horizon, config.delta, {}, solver, std::move(u0), config.p,
                     std::max<std::size_t>(workers, 1)};
    ctx.seeds = seed_range(config.master_seed, overrides.paths.value_or(config.paths));
    return ctx;
}

std::vector<StudyReport> run_study(const RunConfig& config, const std::string& raw_name, std::size_t workers) {
    const std::string name = normalize_study_name(raw_name);
    const auto& names = study_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw InvalidArgument("unknown study '" + raw_name + "'");
    if (!section_present(config, name))
        throw InvalidArgument("study '" + name + "' has no section under \"studies\" in the config");
    const auto& s = config.studies;
    const MonotoneGraph& f = config.drift;

    if (name == "chain_rule") {
        const auto& c = *s.chain_rule;
        HeatSemigroup sg(Grid(config.M), config.nu);
        const auto forcing = [c](double t, double x) {
            return c.amplitude * std::cos(c.frequency * t) * std::sin(c.mode * std::numbers::pi * x);
        };
        return {chain_rule_study(c.q, sg, forcing, config.initial.build(sg.grid()), config.horizon, c.delta)};
    }
    if (name == "bernoulli") return {bernoulli_study(s.bernoulli->samples, s.bernoulli->seed)};
    if (name == "eiconv") return {eiconv_demo(s.eiconv->n_max)};

    const StudyContext ctx = make_context(config, *overrides_for(config, name), workers);
    if (name == "cauchy") return {cauchy_rate_study(f, s.cauchy->q, ctx)};
    if (name == "l1") return {l1_convergence_study(f, ctx)};
    if (name == "apriori") return {apriori_bound_study(f, s.apriori->exponents, ctx)};
    if (name == "contraction") return {contraction_study(f, s.contraction->other.build(ctx.sg.grid()), ctx)};
    if (name == "linear_oracle") {
        std::vector<StudyReport> out;
        for (double c : s.linear_oracle->slopes) {
            StudyReport rep =
                linear_oracle_study(c, s.linear_oracle->deltas, s.linear_oracle->seed, ctx, s.linear_oracle->fine_levels);
            rep.name += "/c_" + label_number(c);
            out.push_back(std::move(rep));
        }
        return out;
    }
    if (name == "mild_identity")
        return {mild_identity_study(f, s.mild_identity->inclusion_tol, s.mild_identity->min_fraction, ctx)};
    if (name == "moments") return {moment_study(f, s.moments->q, s.moments->p, ctx)};
    if (name == "propagation") {
        const auto& p = *s.propagation;
        return {propagation_study(f, p.q.value_or(config.q), p.r.value_or(config.r), p.d.value_or(config.d), ctx)};
    }
    return {contraction_extension_study(f, s.contraction_extension->q, ctx)};
}

std::vector<StudyReport> run_invariants(const RunConfig& config, std::size_t workers) {
    const auto& iv = config.invariants;
    std::vector<MonotoneGraph> drifts = test_drifts();
    std::set<std::string> seen;
    for (const auto& d : drifts) seen.insert(d.name());
    if (!seen.count(config.drift.name())) drifts.push_back(config.drift);

    std::vector<StudyReport> out;
    for (const auto& f : drifts) out.push_back(scalar_identity_check(f, iv.samples, iv.seed, 1e-12));
    out.push_back(closed_form_check(iv.samples, iv.seed + 1));
    out.push_back(inequality_check(iv.inequality_samples, iv.seed + 2));
    const HeatSemigroup sg(Grid(config.M), config.nu);
    out.push_back(semigroup_axiom_check(sg, iv.axiom_samples, iv.seed + 3));
    out.push_back(grid_identity_check(drifts, sg.grid(), iv.axiom_samples, iv.seed + 4));
    out.push_back(noise_exactness_check(sg, iv.noise_paths, iv.seed + 5, workers));
    return out;
}

int exit_code_for(const std::vector<StudyReport>& reports) {
    const std::string v = verdict_summary(reports);
    if (v == "pass") return exit_pass;
    if (v == "inconclusive") return exit_inconclusive;
    return exit_error;
}

int run(const RunConfig& config, const std::string& subcommand, const std::string& study, const RunOptions& options) {
    const fs::path dir = run_directory(config, options);
    Manifest manifest(config, dir);
    const std::size_t workers = std::max<std::size_t>(options.workers, 1);
    std::ostream* log = options.log;

    if (subcommand == "sample-noise") {
        const HeatSemigroup sg(Grid(config.M), config.nu);
        json files = json::array();
        for (std::uint64_t seed : config.seeds()) {
            const NoisePath path = sample_path(config.noise, sg, config.horizon, config.delta, seed);
            const std::string stem = "noise/path_" + std::to_string(seed);
            write_atomic(dir / (stem + ".csv"), trajectory_csv(path.fields, path.time));
            const json sidecar = {{"seed", seed},
                                  {"M", config.M},
                                  {"horizon", config.horizon},
                                  {"delta", path.delta()},
                                  {"steps", path.steps()},
                                  {"weights", config.noise.weights},
                                  {"columns", {"time", "node", "value"}},
                                  {"config_digest", config_digest(config)}};
            write_atomic(dir / (stem + ".json"), sidecar.dump(2) + "\n");
            files.push_back(stem + ".csv");
            if (log) *log << "wrote " << (dir / (stem + ".csv")).string() << '\n';
        }
        manifest.record("sample-noise", {{"files", files}});
        manifest.save();
        return exit_pass;
    }

    if (subcommand == "solve") {
        const StudyContext ctx = make_context(config, {}, workers);
        struct Out {
            std::string csv;
            json diagnostics;
            bool converged;
        };
        const auto results = parallel_map(ctx.seeds.size(), workers, [&](std::size_t s) {
            const NoisePath path = ctx.path(ctx.seeds[s]);
            const MildSolution sol = solve_mild(config.drift, ctx.u0, path, ctx.sg, ctx.solver);
            json levels = json::array();
            for (const auto& l : sol.levels)
                levels.push_back({{"lambda", l.lambda},
                                  {"gap", l.gap ? json(*l.gap) : json(nullptr)},
                                  {"sup_v_norm", l.sup_v_norm},
                                  {"sup_u_norm", l.sup_u_norm}});
            const json diag = {{"seed", ctx.seeds[s]},
                               {"drift", config.drift.name()},
                               {"lambda", sol.lambda},
                               {"converged", sol.converged},
                               {"residual", sol.residual},
                               {"residual_budget", residual_budget(sol.g, path.delta(), ctx.solver.r)},
                               {"levels", levels}};
            return Out{trajectory_csv(sol.u, path.time), diag, sol.converged};
        });
        json files = json::array();
        bool all_converged = true;
        for (std::size_t s = 0; s < results.size(); ++s) {
            const std::string stem = "solve/trajectory_" + std::to_string(ctx.seeds[s]);
            write_atomic(dir / (stem + ".csv"), results[s].csv);
            write_atomic(dir / ("solve/diagnostics_" + std::to_string(ctx.seeds[s]) + ".json"),
                         results[s].diagnostics.dump(2) + "\n");
            files.push_back(stem + ".csv");
            all_converged = all_converged && results[s].converged;
            if (log)
                *log << "seed " << ctx.seeds[s] << ": lambda " << results[s].diagnostics["lambda"].get<double>()
                     << (results[s].converged ? " converged" : " schedule exhausted") << '\n';
        }
        manifest.record("solve", {{"files", files}, {"converged", all_converged}});
        manifest.save();
        return all_converged ? exit_pass : exit_inconclusive;
    }

    std::vector<StudyReport> reports;
    std::string key;
    fs::path base = dir;
    if (subcommand == "study") {
        const std::string name = normalize_study_name(study);
        if (name == "all") {
            for (const auto& n : study_names())
                if (section_present(config, n))
                    for (auto& r : run_study(config, n, workers)) reports.push_back(std::move(r));
            if (reports.empty()) throw InvalidArgument("study all: the config has no \"studies\" sections");
        } else {
            reports = run_study(config, name, workers);
        }
        key = "study " + name;
    } else if (subcommand == "check-invariants") {
        reports = run_invariants(config, workers);
        key = "check-invariants";
        base = dir / "invariants";
    } else {
        throw InvalidArgument("unknown subcommand '" + subcommand + "'");
    }
    const json listing = write_reports(reports, base, dir, log);
    manifest.record(key, {{"verdict", verdict_summary(reports)}, {"reports", listing}});
    manifest.save();
    return exit_code_for(reports);
}

}  // namespace mildlab
