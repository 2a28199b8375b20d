#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "p2pir/common/errors.hpp"

namespace {

using namespace p2pir::tools;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// key=value lines; '#' starts a comment; '_' and '-' are interchangeable in keys.
std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw p2pir::InvalidArgument("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    for (int lineno = 1; std::getline(f, line); ++lineno) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw p2pir::InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        for (char& c : key)
            if (c == '_') c = '-';
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    if (const char* env = std::getenv("P2P_CONFIG")) return env;
    return "";
}

// File values become option defaults, so flags and P2P_ variables win.
void apply_config(CLI::App& app, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        bool used = false;
        for (CLI::App* sub : app.get_subcommands({})) {
            if (CLI::Option* opt = sub->get_option_no_throw("--" + key)) {
                opt->default_str(value);
                opt->default_val(value);
                used = true;
            }
        }
        if (!used) throw p2pir::InvalidArgument("unknown config key: " + key);
    }
}

std::string env_name(const std::string& flag) {
    std::string e = "P2P_";
    for (char c : flag.substr(2)) e += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return e;
}

template <class T>
CLI::Option* opt(CLI::App* sub, const std::string& flag, T& var, const std::string& help) {
    return sub->add_option(flag, var, help)->envname(env_name(flag))->capture_default_str();
}

CLI::Option* flag(CLI::App* sub, const std::string& name, bool& var, const std::string& help) {
    return sub->add_flag(name, var, help)->envname(env_name(name));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Private DHT lookup simulator and PIR benchmarks"};
    app.require_subcommand(1);
    std::string config_path, out_path;
    app.add_option("--config", config_path, "key=value file mirroring the flags (env P2P_CONFIG)");

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Iterative lookups on a simulated network, one CSV row per lookup");
    opt(s, "--peers", sim.peers, "network size");
    opt(s, "--lookups", sim.lookups, "number of random lookups");
    opt(s, "--seed", sim.seed, "experiment seed");
    opt(s, "--mode", sim.mode, "plain, private or both")->check(CLI::IsMember({"plain", "private", "both"}));
    opt(s, "--scheme", sim.scheme, "PIR scheme for private routing");
    opt(s, "--threads", sim.threads, "server threads per response");
    flag(s, "--check", sim.check, "exit 2 when hop counts violate the bounds");
    opt(s, "--svg", sim.svg, "write a hop histogram plot");
    opt(s, "--out", out_path, "CSV output file (default stdout)");

    SizesOptions sz;
    auto* b = app.add_subcommand("bench-sizes", "Key, query and response sizes per scheme and use case");
    opt(b, "--scheme", sz.scheme, "scheme name or all");
    opt(b, "--usecase", sz.usecase, "routing, provider, block or all");
    opt(b, "--items", sz.items, "ads (provider) or blocks (block); 0 picks 50000 / 64");
    opt(b, "--seed", sz.seed, "experiment seed");
    opt(b, "--method", sz.method, "auto, measured or formula")->check(CLI::IsMember({"auto", "measured", "formula"}));
    flag(b, "--check", sz.check, "exit 2 when sizes miss the reference bounds");
    opt(b, "--out", out_path, "CSV output file (default stdout)");

    RuntimeOptions rt;
    auto* r = app.add_subcommand("bench-runtime", "Query, respond and extract times over repeated runs");
    opt(r, "--scheme", rt.scheme, "scheme name");
    opt(r, "--usecase", rt.usecase, "routing, provider or block");
    opt(r, "--rows", rt.rows, "random table of this many rows; 0 uses the use case's table");
    opt(r, "--items", rt.items, "ads (provider) or blocks (block); 0 picks 50000 / 64");
    opt(r, "--threads", rt.threads, "server threads");
    opt(r, "--runs", rt.runs, "repetitions");
    opt(r, "--seed", rt.seed, "experiment seed");
    flag(r, "--key-cache", rt.key_cache, "reuse prepared client keys across runs");
    flag(r, "--check", rt.check, "exit 2 when response time exceeds the bound");
    opt(r, "--out", out_path, "CSV output file (default stdout)");

    CrossoverOptions co;
    auto* c = app.add_subcommand("crossover", "Round-trip bytes of trivial transfer versus PIR as the store grows");
    opt(c, "--usecase", co.usecase, "provider or block");
    opt(c, "--max-cids", co.max_cids, "largest store size");
    opt(c, "--min-cids", co.min_cids, "smallest store size; doubles up to --max-cids");
    opt(c, "--seed", co.seed, "experiment seed");
    opt(c, "--svg", co.svg, "write a plot of the curves");
    opt(c, "--out", out_path, "CSV output file (default stdout)");

    try {
        const std::string cfg = find_config_path(argc, argv);
        if (!cfg.empty()) apply_config(app, load_config(cfg));
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const p2pir::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            std::cerr << "error: cannot write " << out_path << '\n';
            return kExitUsage;
        }
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    try {
        if (s->parsed()) return run_simulate(sim, out, std::cerr);
        if (b->parsed()) return run_bench_sizes(sz, out, std::cerr);
        if (r->parsed()) return run_bench_runtime(rt, out, std::cerr);
        return run_crossover(co, out, std::cerr);
    } catch (const p2pir::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
