#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Experiment configuration: a line-oriented `key = value` format with
// bracketed section headers, every key overridable by a --key value flag
// (flags win).  Unknown keys and malformed values are rejected with the
// offending line number; semantic violations name the precondition.

namespace regretlab {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct run_config {
    std::string command;

    double phi_lo = 0.0, phi_hi = 1.0;
    double theta_lo = 0.25, theta_hi = 0.75;
    int grid = 1001;

    int n = 100;
    std::vector<int> n_list;  // optional sweep for regret-vs-n series
    int l = 1;
    double lambda = 1.0;
    double eps = 0.0;  // 0 = solver default
    long max_iter = 100000;
    std::string mode = "batch";  // batch | online

    std::uint64_t seed = 1;
    long trials = 10000;
    double phi = 0.5;
    int k = 0;
    double alpha = 0.1;
    int d_prime = 1;
    double phi01 = 0.99, phi10 = 0.99;
    long t_max = 100000;
    double tol = 1e-12;
    std::string formula = "gamma-bernoulli";

    std::string out;  // output directory; empty = REGRETLAB_OUT or ./runs

    std::set<std::string> assigned;  // keys explicitly set by file or flags
};

const std::vector<std::string>& known_commands();

// Parse the config text; keys may live under any of the known section
// headers.  Throws config_error with a line number on any problem.
run_config parse_config(const std::string& text);

// Apply `--key value` overrides on top of a parsed config.
void apply_override(run_config& cfg, const std::string& key, const std::string& value);

// Check the preconditions of the dispatched command; throws config_error
// naming the violated precondition.
void validate(const run_config& cfg);

}  // namespace regretlab
