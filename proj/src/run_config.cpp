#include "regretlab/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace regretlab {

namespace {

const std::set<std::string> kSections = {"run", "family", "solver", "output"};

const std::set<std::string> kKeys = {
    "command", "phi_lo", "phi_hi", "theta_lo", "theta_hi", "grid",
    "n", "n_list", "l", "lambda", "eps", "max_iter", "mode",
    "seed", "trials", "phi", "k", "alpha", "d_prime",
    "phi01", "phi10", "t_max", "tol", "formula", "out"};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw config_error("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in numeric value '" + v + "'");
        return d;
    } catch (const config_error&) {
        throw;
    } catch (...) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

long parse_long(const std::string& v, int line) {
    long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        fail(line, "expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& v, int line) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        fail(line, "expected an unsigned integer, got '" + v + "'");
    return out;
}

std::vector<int> parse_int_list(const std::string& v, int line) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        auto comma = v.find(',', start);
        std::string item = trim(v.substr(start, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - start));
        if (!item.empty()) out.push_back(static_cast<int>(parse_long(item, line)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) fail(line, "empty integer list");
    return out;
}

void set_key(run_config& cfg, const std::string& key, const std::string& value, int line) {
    if (!kKeys.count(key)) fail(line, "unknown key '" + key + "'");
    if (key == "command") cfg.command = value;
    else if (key == "phi_lo") cfg.phi_lo = parse_double(value, line);
    else if (key == "phi_hi") cfg.phi_hi = parse_double(value, line);
    else if (key == "theta_lo") cfg.theta_lo = parse_double(value, line);
    else if (key == "theta_hi") cfg.theta_hi = parse_double(value, line);
    else if (key == "grid") cfg.grid = static_cast<int>(parse_long(value, line));
    else if (key == "n") cfg.n = static_cast<int>(parse_long(value, line));
    else if (key == "n_list") cfg.n_list = parse_int_list(value, line);
    else if (key == "l") cfg.l = static_cast<int>(parse_long(value, line));
    else if (key == "lambda") cfg.lambda = parse_double(value, line);
    else if (key == "eps") cfg.eps = parse_double(value, line);
    else if (key == "max_iter") cfg.max_iter = parse_long(value, line);
    else if (key == "mode") cfg.mode = value;
    else if (key == "seed") cfg.seed = parse_u64(value, line);
    else if (key == "trials") cfg.trials = parse_long(value, line);
    else if (key == "phi") cfg.phi = parse_double(value, line);
    else if (key == "k") cfg.k = static_cast<int>(parse_long(value, line));
    else if (key == "alpha") cfg.alpha = parse_double(value, line);
    else if (key == "d_prime") cfg.d_prime = static_cast<int>(parse_long(value, line));
    else if (key == "phi01") cfg.phi01 = parse_double(value, line);
    else if (key == "phi10") cfg.phi10 = parse_double(value, line);
    else if (key == "t_max") cfg.t_max = parse_long(value, line);
    else if (key == "tol") cfg.tol = parse_double(value, line);
    else if (key == "formula") cfg.formula = value;
    else if (key == "out") cfg.out = value;
    cfg.assigned.insert(key);
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds = {
        "capacity",       "misspecified-batch", "misspecified-online",
        "constrained",    "sandwich",           "combined",
        "nml",            "pnml",               "add-beta",
        "asymptotic",     "simulate",           "reproduce-table1"};
    return cmds;
}

run_config parse_config(const std::string& text) {
    run_config cfg;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        std::string raw = text.substr(start, nl == std::string::npos ? std::string::npos
                                                                     : nl - start);
        ++line_no;
        start = (nl == std::string::npos) ? text.size() + 1 : nl + 1;

        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            std::string sec = trim(line.substr(1, line.size() - 2));
            if (!kSections.count(sec)) fail(line_no, "unknown section '" + sec + "'");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "missing key");
        if (value.empty()) fail(line_no, "missing value for '" + key + "'");
        set_key(cfg, key, value, line_no);
    }
    return cfg;
}

void apply_override(run_config& cfg, const std::string& key, const std::string& value) {
    set_key(cfg, key, value, 0);
}

void validate(const run_config& cfg) {
    auto req = [](bool ok, const std::string& what) {
        if (!ok) throw config_error("precondition violated: " + what);
    };
    const auto& cmds = known_commands();
    req(std::find(cmds.begin(), cmds.end(), cfg.command) != cmds.end(),
        "command must be one of the known commands (got '" + cfg.command + "')");
    req(cfg.mode == "batch" || cfg.mode == "online", "mode must be batch or online");
    req(cfg.n >= 1, "n >= 1");
    req(cfg.grid >= 2, "grid >= 2");
    req(cfg.lambda > 0.0, "lambda > 0");
    req(cfg.eps >= 0.0, "eps >= 0");
    req(cfg.max_iter >= 1, "max_iter >= 1");
    req(0.0 <= cfg.phi_lo && cfg.phi_lo <= cfg.theta_lo && cfg.theta_lo <= cfg.theta_hi &&
            cfg.theta_hi <= cfg.phi_hi && cfg.phi_hi <= 1.0,
        "0 <= phi_lo <= theta_lo <= theta_hi <= phi_hi <= 1");
    for (int nv : cfg.n_list) req(nv >= 1, "every n in n_list >= 1");

    if (cfg.command == "combined") req(cfg.l >= 1, "l >= 1");
    if (cfg.command == "pnml") req(cfg.k >= 0 && cfg.k <= cfg.n, "0 <= k <= n");
    if (cfg.command == "sandwich") req(cfg.alpha > 0.0 && cfg.alpha < 1.0, "0 < alpha < 1");
    if (cfg.command == "simulate") {
        req(cfg.trials >= 1, "trials >= 1");
        req(cfg.phi >= 0.0 && cfg.phi <= 1.0, "phi in [0,1]");
    }
    if (cfg.command == "asymptotic") {
        req(cfg.formula == "gamma-bernoulli" || cfg.formula == "markov-order0" ||
                cfg.formula == "markov-series" || cfg.formula == "combined",
            "formula must be gamma-bernoulli | markov-order0 | markov-series | combined");
        if (cfg.formula == "gamma-bernoulli")
            req(cfg.theta_lo < cfg.theta_hi, "theta_lo < theta_hi");
        if (cfg.formula == "markov-order0") req(cfg.n >= 2, "n >= 2");
        if (cfg.formula == "markov-series") {
            req(cfg.phi01 >= 0.0 && cfg.phi01 <= 1.0, "phi01 in [0,1]");
            req(cfg.phi10 >= 0.0 && cfg.phi10 <= 1.0, "phi10 in [0,1]");
            req(cfg.t_max >= 1, "t_max >= 1");
        }
        if (cfg.formula == "combined") req(cfg.l >= 1 && cfg.d_prime >= 1, "l >= 1 and d_prime >= 1");
    }
}

}  // namespace regretlab
