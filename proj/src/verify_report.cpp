#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mildlab/verify.hpp"

namespace mildlab {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Series& StudyReport::add_series(std::string series_name, std::vector<std::string> columns) {
    series.push_back(Series{std::move(series_name), std::move(columns), {}});
    return series.back();
}

void StudyReport::require_at_most(std::string what, double measured, double limit) {
    thresholds.push_back(Threshold{std::move(what), measured, limit, "<=", measured <= limit});
}

void StudyReport::require_at_least(std::string what, double measured, double limit) {
    thresholds.push_back(Threshold{std::move(what), measured, limit, ">=", measured >= limit});
}

void StudyReport::require(std::string what, bool ok) {
    thresholds.push_back(Threshold{std::move(what), ok ? 1.0 : 0.0, 1.0, ">=", ok});
}

StudyReport& StudyReport::finalize() {
    const bool all_ok = std::all_of(thresholds.begin(), thresholds.end(), [](const Threshold& t) { return t.passed; });
    if (!all_ok)
        verdict = Verdict::fail;
    else if (inconclusive || thresholds.empty())
        verdict = Verdict::inconclusive;
    else
        verdict = Verdict::pass;
    return *this;
}

nlohmann::json to_json(const StudyReport& report) {
    nlohmann::json j;
    j["study"] = report.name;
    j["claim"] = report.claim;
    j["inputs"] = report.inputs;
    j["verdict"] = to_string(report.verdict);
    nlohmann::json th = nlohmann::json::array();
    for (const auto& t : report.thresholds)
        th.push_back({{"name", t.name}, {"measured", t.measured}, {"relation", t.relation}, {"limit", t.limit},
                      {"passed", t.passed}});
    j["thresholds"] = th;
    nlohmann::json fitted = nlohmann::json::object();
    for (const auto& [k, v] : report.fitted) fitted[k] = v;
    j["fitted"] = fitted;
    j["notes"] = report.notes;
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : report.series) series.push_back({{"name", s.name}, {"columns", s.columns}, {"rows", s.rows.size()}});
    j["series"] = series;
    return j;
}

std::string series_csv(const StudyReport& report) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& s : report.series) {
        os << "# " << s.name << '\n';
        for (std::size_t c = 0; c < s.columns.size(); ++c) os << (c ? "," : "") << s.columns[c];
        os << '\n';
        for (const auto& row : s.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
            os << '\n';
        }
    }
    return os.str();
}

std::vector<std::uint64_t> seed_range(std::uint64_t master, std::size_t count) {
    std::vector<std::uint64_t> out(count);
    std::iota(out.begin(), out.end(), master);
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<MonotoneGraph> test_drifts() {
    return {MonotoneGraph::linear(1.0), MonotoneGraph::cubic(),      MonotoneGraph::odd_power(2.0),
            MonotoneGraph::odd_power(4.0), MonotoneGraph::sign(), MonotoneGraph::sign_plus_linear()};
}

}  // namespace mildlab
