#include "mildlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "mildlab/errors.hpp"

namespace mildlab {

namespace {

using nlohmann::json;

std::string show(const json& j) { return j.dump(); }

/// Reads one JSON object, records defaults into `norm`, and collects every
/// problem into the shared error list instead of throwing.
class Reader {
public:
    Reader(const json& src, std::string path, std::vector<std::string>& errors)
        : src_(src.is_object() ? src : empty()), path_(std::move(path)), errors_(errors) {
        if (!src.is_object() && !src.is_null()) fail("", "must be an object");
    }

    bool has(const std::string& key) const { return src_.contains(key); }

    double number(const std::string& key, double fallback) {
        const json* v = take(key);
        double out = fallback;
        if (v) {
            if (v->is_number())
                out = v->get<double>();
            else
                fail(key, "must be a number, got " + show(*v));
        }
        norm_[key] = out;
        return out;
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
        const json* v = take(key);
        std::uint64_t out = fallback;
        if (v) {
            if (v->is_number_unsigned())
                out = v->get<std::uint64_t>();
            else
                fail(key, "must be a nonnegative integer, got " + show(*v));
        }
        norm_[key] = out;
        return out;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const json* v = take(key);
        std::string out = fallback;
        if (v) {
            if (v->is_string())
                out = v->get<std::string>();
            else
                fail(key, "must be a string, got " + show(*v));
        }
        norm_[key] = out;
        return out;
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
        const json* v = take(key);
        std::vector<double> out = fallback;
        if (v) {
            out.clear();
            if (!v->is_array()) {
                fail(key, "must be an array of numbers");
            } else {
                for (const auto& e : *v) {
                    if (!e.is_number()) {
                        fail(key, "must contain only numbers, got " + show(e));
                        break;
                    }
                    out.push_back(e.get<double>());
                }
            }
        }
        norm_[key] = out;
        return out;
    }

    /// Raw access for polymorphic values; the caller normalizes.
    const json* raw(const std::string& key) { return take(key); }

    Reader child(const std::string& key) {
        const json* v = take(key);
        return Reader(v ? *v : empty(), path_ + key + ".", errors_);
    }

    void put(const std::string& key, json value) { norm_[key] = std::move(value); }

    void require(bool ok, const std::string& key, const std::string& message) {
        if (!ok) fail(key, message);
    }

    /// Reports unknown keys and returns the normalized object.
    json finish() {
        for (const auto& [key, value] : src_.items())
            if (!used_.count(key)) fail(key, "unknown key");
        return norm_;
    }

    const std::string& path() const { return path_; }

private:
    static const json& empty() {
        static const json e = json::object();
        return e;
    }

    const json* take(const std::string& key) {
        used_.insert(key);
        const auto it = src_.find(key);
        return it == src_.end() ? nullptr : &*it;
    }

    void fail(const std::string& key, const std::string& message) {
        std::string where = path_ + key;
        if (!where.empty() && where.back() == '.') where.pop_back();
        errors_.push_back((where.empty() ? "config" : where) + ": " + message);
    }

    const json& src_;
    std::string path_;
    std::vector<std::string>& errors_;
    json norm_ = json::object();
    std::set<std::string> used_;
};

void check_positive(Reader& r, const std::string& key, double v) { r.require(v > 0.0 && std::isfinite(v), key, "must be > 0"); }

MonotoneGraph builtin_drift(const std::string& name, Reader& r) {
    if (name == "zero") return MonotoneGraph::zero();
    if (name == "cubic") return MonotoneGraph::cubic();
    if (name == "sign") return MonotoneGraph::sign();
    if (name == "sign_plus_linear") return MonotoneGraph::sign_plus_linear();
    if (name == "linear") {
        const double slope = r.number("slope", 1.0);
        r.require(slope >= 0.0, "slope", "must be >= 0");
        return MonotoneGraph::linear(std::max(slope, 0.0));
    }
    if (name == "odd_power") {
        const double d = r.number("d", 2.0);
        r.require(d > 0.0, "d", "must be > 0");
        return MonotoneGraph::odd_power(d > 0.0 ? d : 1.0);
    }
    r.require(false, "builtin",
              "unknown drift '" + name + "' (expected zero, linear, cubic, odd_power, sign, sign_plus_linear)");
    return MonotoneGraph::cubic();
}

std::optional<MonotoneGraph> read_drift(const json* src, Reader& parent, std::vector<std::string>& errors) {
    if (!src) {
        parent.put("drift", {{"builtin", "cubic"}});
        return MonotoneGraph::cubic();
    }
    json doc = src->is_string() ? json{{"builtin", *src}} : *src;
    Reader r(doc, "drift.", errors);
    std::optional<MonotoneGraph> out;
    try {
        if (doc.contains("builtin")) {
            const std::string name = r.text("builtin", "cubic");
            out = builtin_drift(name, r);
        } else {
            const std::vector<double> bps = r.numbers("breakpoints", {});
            std::vector<Branch> branches;
            json branch_norm = json::array();
            const json* raw = r.raw("branches");
            if (!raw || !raw->is_array() || raw->empty()) {
                r.require(false, "branches", "must be a nonempty array");
            } else {
                for (std::size_t k = 0; k < raw->size(); ++k) {
                    Reader b((*raw)[k], "drift.branches[" + std::to_string(k) + "].", errors);
                    Branch br;
                    br.constant = b.number("const", 0.0);
                    br.linear = b.number("linear", 0.0);
                    const std::vector<double> power = b.numbers("power", {0.0, 1.0});
                    b.require(power.size() == 2, "power", "must be [coefficient, exponent]");
                    if (power.size() == 2) {
                        br.power_coeff = power[0];
                        br.power = power[1];
                    }
                    branches.push_back(br);
                    branch_norm.push_back(b.finish());
                }
            }
            r.put("branches", branch_norm);
            const double d = r.number("d", 1.0);
            const double c = r.number("C", 1.0);
            const std::string name = r.text("name", "piecewise");
            if (!branches.empty()) out = MonotoneGraph::piecewise(bps, branches, d, c, name);
        }
    } catch (const Error& e) {
        errors.push_back(std::string("drift: ") + e.what());
        out.reset();
    }
    parent.put("drift", r.finish());
    return out;
}

DiffusionSpec read_noise(Reader r, std::size_t m, std::vector<std::string>& errors, json& norm) {
    DiffusionSpec out;
    if (r.has("weights")) {
        const auto w = r.numbers("weights", {});
        r.require(w.size() == m, "weights", "needs exactly M = " + std::to_string(m) + " entries");
        bool ok = true;
        for (double b : w) ok = ok && std::isfinite(b) && b >= 0.0;
        r.require(ok, "weights", "entries must be finite and >= 0");
        r.require(!r.has("amplitude") && !r.has("smoothness"), "weights",
                  "cannot be combined with amplitude/smoothness");
        r.number("amplitude", 0.0);
        r.number("smoothness", 0.0);
        if (ok && w.size() == m) out = DiffusionSpec::explicit_weights(w);
    } else {
        const double c = r.number("amplitude", 1.0);
        const double gamma = r.number("smoothness", 2.0);
        r.require(c > 0.0 && std::isfinite(c), "amplitude", "must be > 0");
        r.require(gamma >= 0.0 && std::isfinite(gamma), "smoothness", "must be >= 0");
        if (c > 0.0 && gamma >= 0.0 && std::isfinite(c) && std::isfinite(gamma))
            out = DiffusionSpec::from_power_law(m, c, gamma);
    }
    (void)errors;
    norm = r.finish();
    return out;
}

InitialSpec read_initial(Reader r, std::size_t m, json& norm) {
    InitialSpec s;
    s.kind = r.text("kind", "sine");
    s.amplitude = r.number("amplitude", 1.0);
    r.require(std::isfinite(s.amplitude), "amplitude", "must be finite");
    if (s.kind == "sine") {
        const auto mode = r.integer("mode", 1);
        r.require(mode >= 1, "mode", "must be >= 1");
        s.mode = static_cast<int>(mode);
    } else if (s.kind == "spike") {
        s.exponent = r.number("exponent", 0.25);
        r.require(s.exponent >= 0.0 && s.exponent < 1.0, "exponent", "must lie in [0, 1)");
    } else if (s.kind == "values") {
        s.values = r.numbers("values", {});
        r.require(s.values.size() == m, "values", "needs exactly M = " + std::to_string(m) + " entries");
        bool finite = true;
        for (double v : s.values) finite = finite && std::isfinite(v);
        r.require(finite, "values", "entries must be finite");
    } else if (s.kind != "zero") {
        r.require(false, "kind", "must be one of zero, sine, spike, values");
    }
    norm = r.finish();
    return s;
}

/// "lambda": either a list of values or {"base": b, "levels": n} for
/// b 2^-j, j < n. Missing means the default geometric schedule.
std::vector<double> read_schedule(Reader& parent) {
    std::vector<double> out;
    const json* raw = parent.raw("lambda");
    if (raw && raw->is_array()) {
        out = parent.numbers("lambda", {});
    } else {
        Reader l = parent.child("lambda");
        if (l.has("values")) {
            out = l.numbers("values", {});
        } else {
            const double base = l.number("base", 0.25);
            const std::uint64_t levels = l.integer("levels", 7);
            check_positive(l, "base", base);
            l.require(levels >= 1 && levels <= 60, "levels", "must lie in [1, 60]");
            if (base > 0.0 && levels >= 1 && levels <= 60) out = geometric_schedule(base, levels);
        }
        json norm = l.finish();
        norm["schedule"] = out;
        parent.put("lambda", norm);
    }
    bool ok = !out.empty();
    for (std::size_t j = 0; j < out.size(); ++j) ok = ok && out[j] > 0.0 && (j == 0 || out[j] < out[j - 1]);
    parent.require(ok, "lambda", "schedule must be nonempty, positive and strictly decreasing");
    return out;
}

StudyOverrides read_overrides(Reader& r) {
    StudyOverrides o;
    if (r.has("lambda")) {
        o.lambda_schedule = read_schedule(r);
    }
    if (r.has("cauchy_tol")) {
        o.cauchy_tol = r.number("cauchy_tol", 1e-3);
        r.require(*o.cauchy_tol > 0.0, "cauchy_tol", "must be > 0");
    }
    if (r.has("paths")) {
        o.paths = r.integer("paths", 1);
        r.require(*o.paths >= 1, "paths", "must be >= 1");
    }
    return o;
}

void validate_q(Reader& r, const std::string& key, double q, double lower, bool strict) {
    const bool ok = strict ? q > lower : q >= lower;
    std::ostringstream os;
    os << "violates " << key << (strict ? " > " : " ≥ ") << lower;
    r.require(ok && std::isfinite(q), key, os.str());
}

StudySelection read_studies(Reader r, const RunConfig& cfg, json& norm) {
    StudySelection sel;
    if (r.has("cauchy")) {
        Reader s = r.child("cauchy");
        CauchySettings c;
        c.q = s.number("q", cfg.q);
        validate_q(s, "q", c.q, 1.0, true);
        c.overrides = read_overrides(s);
        sel.cauchy = c;
        r.put("cauchy", s.finish());
    }
    if (r.has("l1")) {
        Reader s = r.child("l1");
        L1Settings c;
        c.overrides = read_overrides(s);
        s.require(cfg.drift.growth_exponent() == 0.0, "", "requires a bounded drift (growth exponent 0)");
        sel.l1 = c;
        r.put("l1", s.finish());
    }
    if (r.has("apriori")) {
        Reader s = r.child("apriori");
        AprioriSettings c;
        c.exponents = s.numbers("exponents", c.exponents);
        bool ok = !c.exponents.empty();
        for (double q : c.exponents) ok = ok && q >= 1.0;
        s.require(ok, "exponents", "must be a nonempty list with every q ≥ 1");
        c.overrides = read_overrides(s);
        sel.apriori = c;
        r.put("apriori", s.finish());
    }
    if (r.has("contraction")) {
        Reader s = r.child("contraction");
        ContractionSettings c;
        json other_norm;
        if (s.has("other"))
            c.other = read_initial(s.child("other"), cfg.M, other_norm);
        else
            other_norm = c.other.to_json();
        s.put("other", other_norm);
        c.overrides = read_overrides(s);
        sel.contraction = c;
        r.put("contraction", s.finish());
    }
    if (r.has("linear_oracle")) {
        Reader s = r.child("linear_oracle");
        LinearOracleSettings c;
        c.slopes = s.numbers("slopes", c.slopes);
        c.deltas = s.numbers("deltas", c.deltas);
        c.seed = s.integer("seed", c.seed);
        c.fine_levels = s.integer("fine_levels", c.fine_levels);
        bool ok = !c.slopes.empty();
        for (double v : c.slopes) ok = ok && v > 0.0;
        s.require(ok, "slopes", "must be a nonempty list of positive slopes");
        ok = c.deltas.size() >= 2;
        for (double v : c.deltas) ok = ok && v > 0.0 && std::abs(std::round(cfg.horizon / v) - cfg.horizon / v) < 1e-9 * cfg.horizon / v;
        s.require(ok, "deltas", "needs two or more positive step sizes dividing T");
        c.overrides = read_overrides(s);
        sel.linear_oracle = c;
        r.put("linear_oracle", s.finish());
    }
    if (r.has("mild_identity")) {
        Reader s = r.child("mild_identity");
        MildIdentitySettings c;
        c.inclusion_tol = s.number("inclusion_tol", c.inclusion_tol);
        c.min_fraction = s.number("min_fraction", c.min_fraction);
        check_positive(s, "inclusion_tol", c.inclusion_tol);
        s.require(c.min_fraction >= 0.0 && c.min_fraction <= 1.0, "min_fraction", "must lie in [0, 1]");
        c.overrides = read_overrides(s);
        sel.mild_identity = c;
        r.put("mild_identity", s.finish());
    }
    if (r.has("moments")) {
        Reader s = r.child("moments");
        MomentSettings c;
        c.q = s.number("q", cfg.q);
        c.p = s.number("p", cfg.p);
        validate_q(s, "q", c.q, 1.0, false);
        validate_q(s, "p", c.p, 1.0, false);
        c.overrides = read_overrides(s);
        const std::size_t paths = c.overrides.paths.value_or(cfg.paths);
        s.require(paths >= 100, "paths", "moment estimates need at least 100 paths");
        sel.moments = c;
        r.put("moments", s.finish());
    }
    if (r.has("propagation")) {
        Reader s = r.child("propagation");
        PropagationSettings c;
        c.q = s.number("q", cfg.q);
        c.r = s.number("r", cfg.r);
        c.d = s.number("d", cfg.d);
        validate_q(s, "q", *c.q, 1.0, true);
        s.require(*c.r >= 1.0 && *c.r <= *c.q, "r", "needs 1 ≤ r ≤ q (mild solutions are defined for r ≤ q)");
        s.require(*c.d >= 0.0, "d", "must be >= 0");
        c.overrides = read_overrides(s);
        s.require(c.overrides.paths.value_or(cfg.paths) >= 2, "paths", "needs two or more paths");
        sel.propagation = c;
        r.put("propagation", s.finish());
    }
    if (r.has("contraction_extension")) {
        Reader s = r.child("contraction_extension");
        ExtensionSettings c;
        c.q = s.number("q", cfg.q);
        validate_q(s, "q", c.q, 1.0, true);
        c.overrides = read_overrides(s);
        sel.contraction_extension = c;
        r.put("contraction_extension", s.finish());
    }
    if (r.has("chain_rule")) {
        Reader s = r.child("chain_rule");
        ChainRuleSettings c;
        c.q = s.number("q", c.q);
        c.delta = s.number("delta", c.delta);
        c.amplitude = s.number("amplitude", c.amplitude);
        c.frequency = s.number("frequency", c.frequency);
        c.mode = static_cast<int>(s.integer("mode", c.mode));
        validate_q(s, "q", c.q, 1.0, true);
        check_positive(s, "delta", c.delta);
        s.require(c.mode >= 1, "mode", "must be >= 1");
        s.require(std::isfinite(c.amplitude) && std::isfinite(c.frequency), "amplitude", "forcing must be finite");
        if (c.delta > 0.0) {
            try {
                TimeGrid::make(cfg.horizon, c.delta / 2.0);
            } catch (const Error& e) {
                s.require(false, "delta", e.what());
            }
        }
        sel.chain_rule = c;
        r.put("chain_rule", s.finish());
    }
    if (r.has("bernoulli")) {
        Reader s = r.child("bernoulli");
        BernoulliSettings c;
        c.samples = s.integer("samples", c.samples);
        c.seed = s.integer("seed", c.seed);
        s.require(c.samples >= 1, "samples", "must be >= 1");
        sel.bernoulli = c;
        r.put("bernoulli", s.finish());
    }
    if (r.has("eiconv")) {
        Reader s = r.child("eiconv");
        EiconvSettings c;
        c.n_max = s.integer("n_max", c.n_max);
        s.require(c.n_max >= 1 && c.n_max <= 2048, "n_max", "must lie in [1, 2048]");
        sel.eiconv = c;
        r.put("eiconv", s.finish());
    }
    norm = r.finish();
    return sel;
}

}  // namespace

GridFunction InitialSpec::build(const Grid& grid) const {
    if (kind == "zero") return GridFunction(grid);
    if (kind == "sine")
        return GridFunction::from_function(grid, [&](double x) { return amplitude * std::sin(mode * std::numbers::pi * x); });
    if (kind == "spike")
        return GridFunction::from_function(grid, [&](double x) { return amplitude * std::pow(x, -exponent); });
    if (kind == "values") {
        std::vector<double> v = values;
        for (double& x : v) x *= amplitude;
        return GridFunction(grid, std::move(v));
    }
    throw InvalidArgument("initial datum: unknown kind '" + kind + "'");
}

nlohmann::json InitialSpec::to_json() const {
    json j = {{"kind", kind}, {"amplitude", amplitude}};
    if (kind == "sine") j["mode"] = mode;
    if (kind == "spike") j["exponent"] = exponent;
    if (kind == "values") j["values"] = values;
    return j;
}

std::vector<std::uint64_t> RunConfig::seeds() const {
    std::vector<std::uint64_t> out(paths);
    for (std::size_t i = 0; i < paths; ++i) out[i] = master_seed + i;
    return out;
}

const std::vector<std::string>& study_names() {
    static const std::vector<std::string> names = {
        "cauchy",  "l1",      "apriori",     "contraction",           "linear_oracle", "mild_identity",
        "moments", "propagation", "contraction_extension", "chain_rule",    "bernoulli",     "eiconv"};
    return names;
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.byte, e.what());
    }
    if (!doc.is_object()) throw ParseError(0, "top level must be a JSON object");

    std::vector<std::string> errors;
    RunConfig cfg;
    Reader top(doc, "", errors);

    const std::uint64_t m = top.integer("M", 127);
    top.require(m >= 2, "M", "violates M ≥ 2");
    cfg.M = std::max<std::uint64_t>(m, 2);
    cfg.nu = top.number("nu", 1.0);
    check_positive(top, "nu", cfg.nu);
    cfg.horizon = top.number("T", 1.0);
    check_positive(top, "T", cfg.horizon);
    cfg.delta = top.number("delta", 1.0 / 1024.0);
    check_positive(top, "delta", cfg.delta);
    if (cfg.horizon > 0.0 && cfg.delta > 0.0) {
        try {
            TimeGrid::make(cfg.horizon, cfg.delta);
        } catch (const Error& e) {
            top.require(false, "delta", e.what());
        }
    }

    if (auto drift = read_drift(top.raw("drift"), top, errors)) cfg.drift = *drift;

    json noise_norm;
    cfg.noise = read_noise(top.child("noise"), cfg.M, errors, noise_norm);
    top.put("noise", noise_norm);

    {
        Reader e = top.child("exponents");
        cfg.q = e.number("q", 2.0);
        cfg.r = e.number("r", std::min(2.0, std::max(cfg.q, 1.0)));
        cfg.p = e.number("p", 2.0);
        cfg.d = e.number("d", cfg.drift.growth_exponent());
        validate_q(e, "q", cfg.q, 1.0, false);
        validate_q(e, "r", cfg.r, 1.0, false);
        validate_q(e, "p", cfg.p, 1.0, false);
        e.require(cfg.d >= 0.0, "d", "violates d ≥ 0");
        e.require(!(cfg.r > cfg.q), "r", "violates r ≤ q (mild solutions are defined for r ≤ q)");
        top.put("exponents", e.finish());
    }

    cfg.solver.lambda_schedule = read_schedule(top);
    cfg.solver.cauchy_tol = top.number("cauchy_tol", 1e-3);
    check_positive(top, "cauchy_tol", cfg.solver.cauchy_tol);
    cfg.solver.root_tol = top.number("root_tol", 1e-14);
    check_positive(top, "root_tol", cfg.solver.root_tol);
    cfg.solver.q = cfg.q;
    cfg.solver.r = cfg.r;

    {
        Reader s = top.child("seeds");
        cfg.master_seed = s.integer("master", 7);
        cfg.paths = s.integer("count", 4);
        s.require(cfg.paths >= 1, "count", "must be >= 1");
        top.put("seeds", s.finish());
    }

    json init_norm;
    cfg.initial = read_initial(top.child("initial"), cfg.M, init_norm);
    top.put("initial", init_norm);

    cfg.output = top.text("output", "runs/default");
    top.require(!cfg.output.empty(), "output", "must be a nonempty path");

    json studies_norm;
    cfg.studies = read_studies(top.child("studies"), cfg, studies_norm);
    top.put("studies", studies_norm);

    {
        Reader iv = top.child("invariants");
        cfg.invariants.samples = iv.integer("samples", cfg.invariants.samples);
        cfg.invariants.axiom_samples = iv.integer("axiom_samples", cfg.invariants.axiom_samples);
        cfg.invariants.inequality_samples = iv.integer("inequality_samples", cfg.invariants.inequality_samples);
        cfg.invariants.noise_paths = iv.integer("noise_paths", cfg.invariants.noise_paths);
        cfg.invariants.seed = iv.integer("seed", cfg.invariants.seed);
        iv.require(cfg.invariants.noise_paths >= 2, "noise_paths", "must be >= 2");
        top.put("invariants", iv.finish());
    }

    cfg.normalized = top.finish();
    if (!errors.empty()) throw ValidationError(errors);
    return cfg;
}

std::string config_digest(const RunConfig& config) {
    const std::string canon = config.normalized.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mildlab
