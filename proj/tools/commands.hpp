#ifndef LFCM_TOOLS_COMMANDS_HPP
#define LFCM_TOOLS_COMMANDS_HPP

#include "lfcm/discovery.hpp"
#include "lfcm/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lfcm::cli {

// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kPartialFailure = 1,
    kInputError = 2,
    kStatisticalError = 3,
};

struct SimulateOptions {
    GeneratorConfig generator;
    Index graphs = 1;
    std::vector<Index> n{200};
    std::filesystem::path out_dir;
};

struct DiscoverOptions {
    std::filesystem::path data;
    std::filesystem::path out;
    std::optional<std::filesystem::path> trace;
    DiscoveryConfig discovery;
};

struct EvaluateOptions {
    std::filesystem::path truth;
    std::filesystem::path estimate;
    std::optional<std::filesystem::path> out;  // stdout when empty
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
};

struct BenchmarkOptions {
    GeneratorConfig generator;
    Index graphs = 50;
    Index n = 200;
    std::vector<double> alphas{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    Index replicates = 1;
    unsigned jobs = 1;
    std::optional<std::filesystem::path> out;
};

// One preprocessing step, parsed from text such as
//   "regress-out PKA", "remove-effect Mek from Raf given PKC", "drop PIP3 PKC".
struct PreprocessStep {
    enum class Kind { RegressOut, RemoveEffect, Drop };
    Kind kind;
    std::vector<std::string> columns;  // RemoveEffect: {child, parent, others...}
};

std::vector<PreprocessStep> parse_steps(const std::string& text);

struct PreprocessOptions {
    std::filesystem::path data;
    std::filesystem::path out;
    std::vector<PreprocessStep> steps;
};

// Files written by simulate for graph g and sample size n.
std::string scm_file_name(Index graph);
std::string truth_file_name(Index graph);
std::string data_file_name(Index graph, Index n);

// Seed of graph g under a master seed; data seeds derive from it.
std::uint64_t graph_seed(std::uint64_t master, Index graph);
std::uint64_t data_seed(std::uint64_t graph_seed, Index n, Index replicate = 0);

void cmd_simulate(const SimulateOptions& opt);
void cmd_discover(const DiscoverOptions& opt);
void cmd_evaluate(const EvaluateOptions& opt, std::ostream& out);
// Returns the number of sweep points that failed.
std::size_t cmd_benchmark(const BenchmarkOptions& opt, std::ostream& out, std::ostream& log);
DataMatrix apply_steps(const DataMatrix& data, const std::vector<PreprocessStep>& steps);
void cmd_preprocess(const PreprocessOptions& opt);

// Parses argv (without the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lfcm::cli

#endif  // LFCM_TOOLS_COMMANDS_HPP
