#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "regretlab/artifacts.hpp"
#include "regretlab/run_config.hpp"

namespace {

void print_usage(std::ostream& os) {
    os << "usage: regretlab <command> [--config path] [--key value ...] [--out dir]\n"
       << "commands:";
    for (const auto& c : regretlab::known_commands()) os << " " << c;
    os << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw regretlab::io_error("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace regretlab;
    if (argc < 2) {
        print_usage(std::cerr);
        return exit_parse_error;
    }
    std::string command = argv[1];
    if (command == "--help" || command == "-h" || command == "help") {
        print_usage(std::cout);
        return exit_ok;
    }

    try {
        std::string config_path;
        std::vector<std::pair<std::string, std::string>> overrides;
        for (int i = 2; i < argc; ++i) {
            std::string arg = argv[i];
            if (arg.rfind("--", 0) != 0)
                throw config_error("expected --key value, got '" + arg + "'");
            std::string key = arg.substr(2);
            if (i + 1 >= argc) throw config_error("missing value for --" + key);
            std::string value = argv[++i];
            if (key == "config") config_path = value;
            else overrides.emplace_back(key, value);
        }

        run_config cfg;
        if (!config_path.empty()) cfg = parse_config(read_file(config_path));
        cfg.command = command;  // the positional command wins over the file
        cfg.assigned.insert("command");
        for (const auto& [key, value] : overrides) apply_override(cfg, key, value);
        validate(resolve_defaults(cfg));

        return run_command(cfg);
    } catch (const config_error& e) {
        std::cerr << "regretlab: " << e.what() << "\n";
        return exit_parse_error;
    } catch (const io_error& e) {
        std::cerr << "regretlab: " << e.what() << "\n";
        return exit_io_error;
    } catch (const std::exception& e) {
        std::cerr << "regretlab: " << e.what() << "\n";
        return exit_parse_error;
    }
}
