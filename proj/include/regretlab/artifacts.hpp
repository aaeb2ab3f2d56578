#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "regretlab/run_config.hpp"

// Reproducible run artifacts: a JSON manifest echoing the full effective
// configuration, result CSVs (LF line endings, '.' decimal separator), and
// whitespace-delimited plot-data files.  Every file is written to a temporary
// name and renamed on success, so failures leave no partial artifacts.

namespace regretlab {

inline constexpr const char* kToolName = "regretlab";
inline constexpr const char* kToolVersion = "0.1.0";

enum exit_code : int {
    exit_ok = 0,
    exit_parse_error = 2,
    exit_no_convergence = 3,
    exit_io_error = 4,
};

// Shortest locale-independent round-trip formatting.
std::string format_double(double v);

// Full effective configuration (defaults resolved), suitable for replay.
nlohmann::json config_to_json(const run_config& cfg);
run_config config_from_json(const nlohmann::json& j);

// Defaults that depend on the command (e.g. constrained runs online unless
// the mode was given explicitly).
run_config resolve_defaults(const run_config& cfg);

std::filesystem::path resolve_out_dir(const run_config& cfg);

struct plot_series {
    std::string filename;
    std::string comment;  // figure the file regenerates; written after "# "
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Writes one x/y-series file per entry; an empty list writes nothing.
void emit_plotdata(const std::filesystem::path& dir,
                   const std::vector<plot_series>& series);

void write_text_atomic(const std::filesystem::path& path, const std::string& content);

// Executes the command and persists its artifacts.  Returns an exit code;
// solver non-convergence still writes artifacts but exits nonzero.
int run_command(const run_config& cfg);

}  // namespace regretlab
