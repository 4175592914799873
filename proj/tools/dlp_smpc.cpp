// dlp_smpc: backtests, benchmark comparison, grid search and self-checks.

#include "dlpsmpc/controller.hpp"
#include "dlpsmpc/error.hpp"
#include "dlpsmpc/grid_search.hpp"
#include "dlpsmpc/market_data.hpp"
#include "dlpsmpc/metrics.hpp"
#include "dlpsmpc/report_io.hpp"
#include "dlpsmpc/strategies.hpp"
#include "dlpsmpc/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Every setting that may come from a config file or a flag. Flags use the
// same names with '_' replaced by '-'.
const std::vector<std::pair<std::string, std::string>> kDefaults = {
    {"input", ""},
    {"date_column", "date"},
    {"price_column", "close"},
    {"delimiter", ","},
    {"start", ""},
    {"end", ""},
    {"capital", "100"},
    {"strategies", "smpc"},
    {"gamma", "0.1"},
    {"horizon", "29"},
    {"window", "18"},
    {"epsilon", "0"},
    {"constant_weight", "0.51"},
    {"x_min", ""},
    {"x_max", ""},
    {"bound_margin", "0.1"},
    {"al_rho0", "10"},
    {"al_lambda0", "0"},
    {"al_maxiter", "10"},
    {"al_tol", "1e-8"},
    {"lbfgs_memory", "10"},
    {"lbfgs_tol", "1e-8"},
    {"lbfgs_max_iter", "500"},
    {"asset_class", "crypto"},
    {"risk_free", "0"},
    {"output_dir", "."},
    {"gammas", "0.1,0.5,1"},
    {"horizons", "2,29,50"},
    {"windows", "5,18,60"},
    {"validation_start", ""},
    {"cv_gamma", "1"},
    {"threads", "0"},
};

std::string flag_name(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

class Settings {
public:
    // Flags override config-file values, which override defaults.
    static Settings resolve(const std::map<std::string, std::string>& flags, const std::string& config_path) {
        Settings s;
        for (const auto& [k, v] : kDefaults) s.values_[k] = v;
        if (!config_path.empty()) {
            for (const auto& [k, v] : dlp::load_config(config_path)) {
                if (!s.values_.count(k)) throw dlp::DataError("unknown config key '" + k + "'");
                s.values_[k] = v;
            }
        }
        for (const auto& [k, v] : flags) s.values_[k] = v;
        return s;
    }

    const std::string& str(const std::string& key) const { return values_.at(key); }

    double num(const std::string& key) const { return parse_double(key, str(key)); }

    std::size_t count(const std::string& key) const { return parse_size(key, str(key)); }

    std::optional<double> opt_num(const std::string& key) const {
        if (str(key).empty()) return std::nullopt;
        return num(key);
    }

    dlp::ConfigEntries entries(const std::vector<std::string>& keys) const {
        dlp::ConfigEntries out;
        for (const auto& k : keys) out.emplace_back(k, str(k));
        return out;
    }

    static double parse_double(const std::string& key, const std::string& text) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw std::invalid_argument(key + ": not a number: '" + text + "'");
        return v;
    }

    static std::size_t parse_size(const std::string& key, const std::string& text) {
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw std::invalid_argument(key + ": not a non-negative integer: '" + text + "'");
        return v;
    }

private:
    std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// "a,b,c" or an inclusive range "lo:hi:step".
std::vector<double> parse_grid_values(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(Settings::parse_double(key, item));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) throw std::invalid_argument(key + ": range must be lo:hi:step");
        const double lo = Settings::parse_double(key, item.substr(0, c1));
        const double hi = Settings::parse_double(key, item.substr(c1 + 1, c2 - c1 - 1));
        const double step = Settings::parse_double(key, item.substr(c2 + 1));
        if (!(step > 0.0) || hi < lo) throw std::invalid_argument(key + ": invalid range '" + item + "'");
        const auto n = static_cast<std::size_t>((hi - lo) / step + 1e-9);
        for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    }
    return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::vector<double>& v) {
    std::vector<std::size_t> out;
    for (double d : v) {
        if (d < 0.0 || d != static_cast<double>(static_cast<std::size_t>(d)))
            throw std::invalid_argument(key + ": expected non-negative integers");
        out.push_back(static_cast<std::size_t>(d));
    }
    return out;
}

dlp::Date parse_date(const std::string& key, const std::string& text) {
    const auto d = dlp::Date::parse(text);
    if (!d) throw std::invalid_argument(key + ": not a YYYY-MM-DD date: '" + text + "'");
    return *d;
}

dlp::ControllerConfig controller_config(const Settings& s) {
    dlp::ControllerConfig c;
    c.gamma = s.num("gamma");
    c.horizon = s.count("horizon");
    c.window = s.count("window");
    c.epsilon_cost = s.num("epsilon");
    c.al.rho0 = s.num("al_rho0");
    c.al.lambda0 = s.num("al_lambda0");
    c.al.al_maxiter = s.count("al_maxiter");
    c.al.al_tol = s.num("al_tol");
    c.solver.memory = s.count("lbfgs_memory");
    c.solver.tol = s.num("lbfgs_tol");
    c.solver.max_iter = s.count("lbfgs_max_iter");
    c.validate();
    return c;
}

// Loads prices, applies the inclusive date range and builds returns.
dlp::ReturnSeries load_returns(const Settings& s) {
    if (s.str("input").empty()) throw std::invalid_argument("no input file given (--input)");
    const fs::path input = s.str("input");
    if (!fs::exists(input)) throw dlp::DataError("input file not found: " + input.string());
    dlp::ColumnMapping fmt;
    fmt.date_column = s.str("date_column");
    fmt.price_column = s.str("price_column");
    if (s.str("delimiter").size() != 1) throw std::invalid_argument("delimiter must be a single character");
    fmt.delimiter = s.str("delimiter")[0];
    auto prices = dlp::load_prices(input, fmt);

    std::optional<dlp::Date> first, last;
    if (!s.str("start").empty()) first = parse_date("start", s.str("start"));
    if (!s.str("end").empty()) last = parse_date("end", s.str("end"));
    if (first || last) prices = prices.slice(first, last);
    if (prices.size() < 2) throw dlp::DataError("date range selects fewer than two rows");

    std::optional<dlp::ReturnBounds> bounds;
    const auto x_min = s.opt_num("x_min");
    const auto x_max = s.opt_num("x_max");
    if (x_min.has_value() != x_max.has_value()) throw std::invalid_argument("x_min and x_max must be given together");
    if (x_min) bounds = dlp::ReturnBounds{*x_min, *x_max};
    return dlp::to_returns(prices, bounds, s.num("bound_margin"));
}

int ppy(const Settings& s) {
    const auto& a = s.str("asset_class");
    if (a == "crypto") return dlp::periods_per_year(dlp::AssetClass::Crypto);
    if (a == "equity") return dlp::periods_per_year(dlp::AssetClass::Equity);
    throw std::invalid_argument("asset_class must be 'crypto' or 'equity'");
}

// Artifacts are rendered in memory, written to a staging directory and only
// then moved into place, so a failed run leaves nothing behind.
class ArtifactSet {
public:
    void add(std::string name, std::string contents) { files_.emplace_back(std::move(name), std::move(contents)); }

    void commit(const fs::path& dir) const {
        fs::create_directories(dir);
        const fs::path staging = dir / ".dlp_smpc.staging";
        fs::remove_all(staging);
        fs::create_directories(staging);
        try {
            for (const auto& [name, body] : files_) {
                std::ofstream out(staging / name, std::ios::binary);
                out << body;
                out.close();
                if (!out) throw std::runtime_error("failed to write " + (staging / name).string());
            }
            for (const auto& [name, body] : files_) fs::rename(staging / name, dir / name);
        } catch (...) {
            std::error_code ec;
            for (const auto& [name, body] : files_) fs::remove(staging / name, ec);
            fs::remove_all(staging, ec);
            throw;
        }
        fs::remove_all(staging);
    }

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

const std::vector<std::string> kRunKeys = {
    "input", "date_column", "price_column", "delimiter", "start", "end", "capital", "strategies", "gamma",
    "horizon", "window", "epsilon", "constant_weight", "x_min", "x_max", "bound_margin", "al_rho0", "al_lambda0",
    "al_maxiter", "al_tol", "lbfgs_memory", "lbfgs_tol", "lbfgs_max_iter", "asset_class", "risk_free"};

int cmd_backtest(const Settings& s, bool compare) {
    const auto returns = load_returns(s);
    const auto cfg = controller_config(s);
    const double v0 = s.num("capital");
    auto config = s.entries(kRunKeys);
    config.emplace_back("x_min_resolved", dlp::format_number(returns.x_min()));
    config.emplace_back("x_max_resolved", dlp::format_number(returns.x_max()));

    auto names = split_list(s.str("strategies"));
    if (compare && s.str("strategies") == "smpc") names = {"smpc", "constant", "buy_and_hold", "w1", "w2", "w3"};
    if (names.empty()) throw std::invalid_argument("no strategies selected");

    std::vector<dlp::Trajectory> trajs;
    for (const auto& name : names) {
        if (name == "smpc") {
            trajs.push_back(dlp::run(returns, v0, cfg, [](std::string_view msg) {
                std::cerr << "dlp_smpc: " << msg << '\n';
            }));
            continue;
        }
        const auto kind = dlp::BenchmarkSpec::parse_kind(name);
        if (!kind) throw std::invalid_argument("unknown strategy '" + name + "'");
        dlp::BenchmarkSpec spec;
        spec.kind = *kind;
        spec.constant_weight = s.num("constant_weight");
        trajs.push_back(dlp::run_benchmark(returns, v0, spec, cfg.epsilon_cost));
    }

    ArtifactSet artifacts;
    std::vector<std::pair<std::string, dlp::PerformanceReport>> rows;
    for (const auto& t : trajs) {
        const auto rep = dlp::evaluate(t.equity(), ppy(s), s.num("risk_free"));
        rows.emplace_back(t.strategy, rep);
        artifacts.add("trajectory_" + t.strategy + ".csv", dlp::trajectory_csv(t, config));
        std::ostringstream kv;
        dlp::write_report_kv(kv, t.strategy, rep, config);
        artifacts.add("report_" + t.strategy + ".txt", kv.str());
    }
    if (trajs.size() > 1 || compare) {
        artifacts.add("comparison.txt", dlp::comparison_table(rows));
        std::ostringstream eq;
        dlp::write_equity_series(eq, trajs, config);
        artifacts.add("equity.csv", eq.str());
    }
    artifacts.commit(s.str("output_dir"));
    std::cout << dlp::comparison_table(rows);
    return 0;
}

int cmd_grid_search(const Settings& s) {
    const auto returns = load_returns(s);
    const auto cfg = controller_config(s);

    dlp::ParameterGrid grid;
    grid.gammas = parse_grid_values("gammas", s.str("gammas"));
    grid.horizons = to_sizes("horizons", parse_grid_values("horizons", s.str("horizons")));
    grid.windows = to_sizes("windows", parse_grid_values("windows", s.str("windows")));

    dlp::GridSearchOptions opts;
    opts.cv_gamma = s.num("cv_gamma");
    opts.threads = s.count("threads");
    opts.v0 = s.num("capital");
    if (s.str("validation_start").empty()) throw std::invalid_argument("grid-search requires --validation-start");
    {
        const auto split = parse_date("validation_start", s.str("validation_start"));
        const auto& dates = returns.dates();
        const auto it = std::lower_bound(dates.begin(), dates.end(), split);
        if (it == dates.end()) throw std::invalid_argument("validation start is after the last date");
        if (it == dates.begin()) throw std::invalid_argument("validation start leaves no training data");
        opts.validation_start = static_cast<std::size_t>(it - dates.begin());
    }

    const auto rows = dlp::grid_search(returns, grid, cfg, opts);

    auto config = s.entries(kRunKeys);
    for (const auto& k : {"gammas", "horizons", "windows", "validation_start", "cv_gamma"})
        config.emplace_back(k, s.str(k));
    std::ostringstream out;
    for (const auto& [k, v] : config) out << "# " << k << " = " << v << '\n';
    out << "rank,gamma,horizon,window,criterion,validation_return_pct,validation_max_drawdown_pct,fallbacks,error\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << i + 1 << ',' << dlp::format_number(r.gamma) << ',' << r.horizon << ',' << r.window << ','
            << (r.criterion ? dlp::format_number(*r.criterion) : "") << ','
            << dlp::format_number(r.validation_return_pct) << ','
            << dlp::format_number(r.validation_max_drawdown_pct) << ',' << r.fallbacks << ',' << r.error << '\n';
    }
    ArtifactSet artifacts;
    artifacts.add("grid_search.csv", out.str());
    artifacts.commit(s.str("output_dir"));
    std::cout << "evaluated " << rows.size() << " parameter triples\n";
    if (!rows.empty() && rows.front().criterion)
        std::cout << "best: gamma=" << rows.front().gamma << " H=" << rows.front().horizon
                  << " L=" << rows.front().window << '\n';
    return 0;
}

int cmd_verify(std::uint64_t seed, bool corrupt, bool full) {
    dlp::VerifyOptions opts;
    opts.seed = seed;
    opts.corrupt_gradient_sign = corrupt;
    if (full) {
        opts.dlp_instances = 100;
        opts.survival_paths = 100000;
    }
    bool ok = true;
    for (const auto& r : dlp::run_verification(opts)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.checks - r.failures << '/' << r.checks
                  << " checks, " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DLP trading controller with stochastic model predictive control"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;

    auto add_run_options = [&](CLI::App* sub, const std::vector<std::string>& keys) {
        sub->add_option("--config", config_path, "Flat key = value config file");
        for (const auto& k : keys) opts[sub->get_name() + "/" + k] = sub->add_option(flag_name(k), raw[k], k);
    };

    std::vector<std::string> run_keys = kRunKeys;
    run_keys.push_back("output_dir");
    auto* backtest = app.add_subcommand("backtest", "Run strategies and write trajectories and reports");
    add_run_options(backtest, run_keys);
    auto* compare = app.add_subcommand("compare", "Run the controller and all benchmarks side by side");
    add_run_options(compare, run_keys);
    auto grid_keys = run_keys;
    for (const auto& k : {"gammas", "horizons", "windows", "validation_start", "cv_gamma", "threads"})
        grid_keys.push_back(k);
    auto* grid = app.add_subcommand("grid-search", "Rank (gamma, H, L) triples on a validation span");
    add_run_options(grid, grid_keys);

    std::uint64_t seed = dlp::VerifyOptions{}.seed;
    bool corrupt = false, full = false;
    auto* verify = app.add_subcommand("verify", "Run the built-in oracle suites");
    verify->add_option("--seed", seed, "Random seed");
    verify->add_flag("--corrupt-gradient", corrupt, "Negative control: flip the analytical gradient sign");
    verify->add_flag("--full", full, "Use the full instance counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (verify->parsed()) return cmd_verify(seed, corrupt, full);
        CLI::App* active = backtest->parsed() ? backtest : compare->parsed() ? compare : grid;
        std::map<std::string, std::string> given;
        for (const auto& [id, opt] : opts)
            if (id.rfind(active->get_name() + "/", 0) == 0 && opt->count() > 0)
                given[id.substr(active->get_name().size() + 1)] = raw[id.substr(active->get_name().size() + 1)];
        const auto settings = Settings::resolve(given, config_path);
        if (active == grid) return cmd_grid_search(settings);
        return cmd_backtest(settings, active == compare);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "dlp_smpc: error: " << msg << '\n';
        return 2;
    }
}
