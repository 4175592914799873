#include "dlpsmpc/report_io.hpp"

#include "dlpsmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dlp {

namespace {

void write_header(std::ostream& out, const ConfigEntries& config) {
    for (const auto& [k, v] : config) out << "# " << k << " = " << v << '\n';
}

std::string ratio(const std::optional<double>& r) {
    if (!r) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *r);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ConfigEntries& config) {
    write_header(out, config);
    out << "index,date,w_applied,v_long,v_short,total,mu_hat,sigma2_hat,al_feasible\n";
    const std::size_t t = traj.steps.size();
    for (std::size_t k = 0; k <= t; ++k) {
        const AccountState s = traj.state_at(k);
        out << k << ',' << (traj.dates.empty() ? std::string() : traj.dates[k].to_string()) << ',';
        if (k < t) out << format_number(traj.steps[k].weight);
        out << ',' << format_number(s.v_long) << ',' << format_number(s.v_short) << ','
            << format_number(total_value(s)) << ',';
        if (k < t) {
            const auto& st = traj.steps[k];
            out << format_number(st.mu_hat) << ',' << format_number(st.sigma2_hat) << ',' << (st.al_feasible ? 1 : 0);
        } else {
            out << ",,";
        }
        out << '\n';
    }
}

std::string trajectory_csv(const Trajectory& traj, const ConfigEntries& config) {
    std::ostringstream out;
    write_trajectory_csv(out, traj, config);
    return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_report_kv(std::ostream& out, std::string_view strategy, const PerformanceReport& rep,
                     const ConfigEntries& config) {
    write_header(out, config);
    out << "strategy = " << strategy << '\n'
        << "total_return_pct = " << format_number(rep.total_return) << '\n'
        << "sharpe_annualized = " << (rep.sharpe_annualized ? format_number(*rep.sharpe_annualized) : "undefined")
        << '\n'
        << "sortino_annualized = "
        << (rep.sortino_annualized ? format_number(*rep.sortino_annualized) : "undefined") << '\n'
        << "max_drawdown_pct = " << format_number(rep.max_drawdown) << '\n'
        << "annualization_factor = " << rep.annualization_factor << '\n';
}

std::string comparison_table(const std::vector<std::pair<std::string, PerformanceReport>>& rows) {
    const std::vector<std::string> labels = {"Total Return (%)", "Sharpe Ratio (Annualized)", "Maximum Drawdown (%)",
                                             "Sortino Ratio (Annualized)"};
    std::vector<std::vector<std::string>> cells(labels.size());
    for (const auto& [name, rep] : rows) {
        cells[0].push_back(fixed(rep.total_return, 2));
        cells[1].push_back(ratio(rep.sharpe_annualized));
        cells[2].push_back(fixed(rep.max_drawdown, 2));
        cells[3].push_back(ratio(rep.sortino_annualized));
    }
    std::size_t label_w = 6;
    for (const auto& l : labels) label_w = std::max(label_w, l.size());
    std::vector<std::size_t> col_w;
    for (std::size_t c = 0; c < rows.size(); ++c) {
        std::size_t wdt = rows[c].first.size();
        for (const auto& r : cells) wdt = std::max(wdt, r[c].size());
        col_w.push_back(wdt);
    }

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(label_w)) << "Metric";
    for (std::size_t c = 0; c < rows.size(); ++c)
        out << "  " << std::right << std::setw(static_cast<int>(col_w[c])) << rows[c].first;
    out << '\n';
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out << std::left << std::setw(static_cast<int>(label_w)) << labels[r];
        for (std::size_t c = 0; c < rows.size(); ++c)
            out << "  " << std::right << std::setw(static_cast<int>(col_w[c])) << cells[r][c];
        out << '\n';
    }
    return out.str();
}

void write_equity_series(std::ostream& out, const std::vector<Trajectory>& trajs, const ConfigEntries& config) {
    write_header(out, config);
    out << "step,date";
    for (const auto& t : trajs) out << ',' << t.strategy;
    out << '\n';
    if (trajs.empty()) return;
    std::vector<std::vector<double>> curves;
    for (const auto& t : trajs) curves.push_back(t.equity());
    const std::size_t len = curves.front().size();
    for (const auto& c : curves)
        if (c.size() != len) throw std::invalid_argument("equity series differ in length");
    for (std::size_t k = 0; k < len; ++k) {
        out << k << ',' << (trajs.front().dates.empty() ? std::string() : trajs.front().dates[k].to_string());
        for (const auto& c : curves) out << ',' << format_number(c[k]);
        out << '\n';
    }
}

std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw DataError("config line lacks '='", line_no);
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw DataError("config line has an empty key", line_no);
        if (!out.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
            throw DataError("duplicate config key '" + key + "'", line_no);
    }
    return out;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace dlp
