#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>

namespace p2pir::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitThreshold = 2;

struct SimulateOptions {
    std::size_t peers = 2000;
    std::size_t lookups = 500;
    std::uint64_t seed = 1;
    std::string mode = "both";
    std::string scheme = "rlwe-logn";
    unsigned threads = 1;
    bool check = false;
    std::string svg;
};

struct SizesOptions {
    std::string scheme = "all";
    std::string usecase = "all";
    std::size_t items = 0;  // 0: ads 50000 / blocks 64
    std::uint64_t seed = 1;
    std::string method = "auto";
    bool check = false;
};

struct RuntimeOptions {
    std::string scheme = "rlwe3";
    std::string usecase = "routing";
    std::size_t rows = 0;  // 0: the use case's real table
    std::size_t items = 0;
    unsigned threads = 1;
    std::size_t runs = 10;
    std::uint64_t seed = 1;
    bool key_cache = false;
    bool check = false;
};

struct CrossoverOptions {
    std::string usecase = "provider";
    std::size_t max_cids = 100000;
    std::size_t min_cids = 1000;
    std::uint64_t seed = 1;
    std::string svg;
};

// Each writes CSV to `out` and a summary to `log`; the return value is
// an exit code.
int run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& log);
int run_bench_sizes(const SizesOptions& o, std::ostream& out, std::ostream& log);
int run_bench_runtime(const RuntimeOptions& o, std::ostream& out, std::ostream& log);
int run_crossover(const CrossoverOptions& o, std::ostream& out, std::ostream& log);

}  // namespace p2pir::tools
