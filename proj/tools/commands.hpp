#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <dendro/experiments.hpp>

namespace dendro::cli {

enum ExitCode : int {
    kOk = 0,
    kMalformedInput = 1,
    kDegenerate = 2,
    kInsufficientSamples = 3,
    kUsage = 64,
};

enum class LogLevel { quiet, info, debug };

struct GlobalConfig {
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = ".";
    LogLevel log_level = LogLevel::info;
    std::optional<std::size_t> threads;
};

struct EstimateOptions {
    std::filesystem::path input;
    double noise_std = 0.0;
    EstimatorConfig estimator{};
};

struct FrequencyOptions {
    ExperimentSpec spec{};
};

struct CompareOptions {
    ExperimentSpec spec{};
    std::vector<double> noise_levels{0.05, 0.1, 0.2, 0.3};
};

int cmd_slhc(const std::filesystem::path& input, std::ostream& out, std::ostream& err);
int cmd_estimate(const EstimateOptions& options, const GlobalConfig& global, std::ostream& out, std::ostream& err);
int cmd_simulate_frequency(const FrequencyOptions& options, const GlobalConfig& global, std::ostream& err);
int cmd_simulate_compare(const CompareOptions& options, const GlobalConfig& global, std::ostream& err);
int cmd_structures_count(std::size_t n, std::ostream& out, std::ostream& err);
int cmd_structures_list(std::size_t n, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dendro::cli
