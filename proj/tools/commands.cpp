#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <dendro/errors.hpp>
#include <dendro/io.hpp>
#include <dendro/parallel.hpp>

namespace dendro::cli {

namespace {

void log(const GlobalConfig& global, LogLevel level, std::ostream& err, const std::string& message) {
    if (global.log_level != LogLevel::quiet && static_cast<int>(level) <= static_cast<int>(global.log_level)) {
        err << "dendro-mle: " << message << '\n';
    }
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out{dir / name, std::ios::binary};
    if (!out) {
        throw std::runtime_error{"cannot write " + (dir / name).string()};
    }
    return out;
}

}  // namespace

int cmd_slhc(const std::filesystem::path& input, std::ostream& out, std::ostream& err) {
    Dissimilarity x;
    try {
        x = io::read_dissimilarity_csv(input);
    } catch (const Error& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kMalformedInput;
    }
    const Dendrogram d = slhc_dendrogram(x);
    auto j = io::to_json(d);
    const bool degenerate = d.degenerate();
    if (degenerate) {
        j["warning"] = "degenerate structure: a height merges more than two clusters or is shared by two merges";
        err << "dendro-mle: warning: degenerate single-linkage structure\n";
    }
    out << j.dump() << '\n';
    return degenerate ? kDegenerate : kOk;
}

int cmd_estimate(const EstimateOptions& options, const GlobalConfig& global, std::ostream& out, std::ostream& err) {
    Dissimilarity x;
    try {
        x = io::read_dissimilarity_csv(options.input);
    } catch (const Error& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kMalformedInput;
    }
    try {
        Rng rng{global.seed};
        const auto report = mle_estimate(x, NoiseSpec::from_std(options.noise_std), options.estimator, rng);
        if (report.scale != 1.0) {
            log(global, LogLevel::info, err, "measurement rescaled by 1/" + io::format_double(report.scale));
        }
        out << io::to_json(report).dump() << '\n';
    } catch (const InsufficientSamples& e) {
        err << "dendro-mle: insufficient fiber samples: " << e.what()
            << " (try a larger --proposals-per-cone or a smaller --min-fiber-samples)\n";
        return kInsufficientSamples;
    } catch (const ProposalStuck& e) {
        err << "dendro-mle: " << e.what() << " (try a smaller --noise-std or a different --seed)\n";
        return kInsufficientSamples;
    } catch (const DomainError& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kMalformedInput;
    }
    return kOk;
}

int cmd_simulate_frequency(const FrequencyOptions& options, const GlobalConfig& global, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentSpec spec = options.spec;
    spec.seed = global.seed;
    FrequencyStudy study;
    try {
        study = run_frequency_study(spec);
    } catch (const InsufficientSamples& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kInsufficientSamples;
    }
    auto histogram = open_output(global.output_dir, "histogram.csv");
    write_histogram_csv(histogram, study.histogram);
    auto ranks = open_output(global.output_dir, "ranks.csv");
    write_ranks_csv(ranks, study.ranks);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log(global, LogLevel::info, err,
        "frequency study: rank-1 probability " + io::format_double(study.ranks.probability(1)) + ", " +
            io::format_double(study.histogram.mean_counts[0]) + " structures in the lowest bin (" +
            std::to_string(seconds) + " s)");
    if (study.stuck > 0) {
        log(global, LogLevel::info, err,
            std::to_string(study.stuck) + " measurements stopped on ProposalStuck and count as unranked");
    }
    return kOk;
}

int cmd_simulate_compare(const CompareOptions& options, const GlobalConfig& global, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentSpec spec = options.spec;
    spec.seed = global.seed;
    const auto rows = run_comparison_study(spec, options.noise_levels);
    auto out = open_output(global.output_dir, "compare.csv");
    write_comparison_csv(out, rows);
    for (const auto& row : rows) {
        log(global, LogLevel::info, err,
            "noise " + io::format_double(row.noise_std) + ": mle " + io::format_double(row.mle_rate) + ", slhc " +
                io::format_double(row.slhc_rate) + ", likelihood failures " + std::to_string(row.mle_failures));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log(global, LogLevel::debug, err, "comparison study took " + std::to_string(seconds) + " s");
    return kOk;
}

int cmd_structures_count(std::size_t n, std::ostream& out, std::ostream& err) {
    try {
        out << count_structures(n) << '\n';
    } catch (const Error& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

int cmd_structures_list(std::size_t n, std::ostream& out, std::ostream& err) {
    try {
        const StructureCatalog catalog{n};
        for (std::size_t k = 0; k < catalog.size(); ++k) {
            auto j = io::to_json(catalog[k]);
            j["index"] = k;
            out << j.dump() << '\n';
        }
    } catch (const Error& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximum-likelihood dendrogram structure estimation for single-linkage clustering",
                 "dendro-mle"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalConfig global;
    std::string log_level = "info";
    app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads (overrides DENDRO_MLE_THREADS; 0 = auto)");
    app.add_option("--log-level", log_level, "quiet, info or debug")
        ->check(CLI::IsMember({"quiet", "info", "debug"}))
        ->capture_default_str();

    auto add_mh = [](CLI::App* cmd, MHConfig& mh) {
        cmd->add_option("--burn-in", mh.burn_in, "MH burn-in transitions")->capture_default_str();
        cmd->add_option("--thinning", mh.thinning, "MH thinning step")->capture_default_str();
        cmd->add_option("--n-theta", mh.n_theta, "Recorded MH states")->capture_default_str();
        cmd->add_option("--n-hypotheses", mh.n_hypotheses, "Structures kept after pruning")->capture_default_str();
    };
    auto add_likelihood = [](CLI::App* cmd, LikelihoodConfig& lik) {
        cmd->add_option("--n-omega", lik.n_omega, "Height vectors per likelihood")->capture_default_str();
        cmd->add_option("--proposals-per-cone", lik.fiber_budget.proposals_per_cone, "Fiber proposals per cone")
            ->capture_default_str();
        cmd->add_option("--min-fiber-samples", lik.fiber_budget.min_total_accepted,
                        "Accepted fiber samples per height")
            ->capture_default_str();
    };

    std::filesystem::path slhc_input;
    auto* slhc_cmd = app.add_subcommand("slhc", "Single-linkage dendrogram of a dissimilarity CSV");
    slhc_cmd->add_option("--input", slhc_input, "Dissimilarity CSV")->required();

    EstimateOptions estimate;
    bool no_rescale = false;
    auto* estimate_cmd = app.add_subcommand("estimate", "Approximate MLE of the dendrogram structure");
    estimate_cmd->add_option("--input", estimate.input, "Dissimilarity CSV")->required();
    estimate_cmd->add_option("--noise-std", estimate.noise_std, "Measurement noise standard deviation")
        ->required()
        ->check(CLI::PositiveNumber);
    estimate_cmd->add_flag("--no-rescale", no_rescale, "Use x as given instead of normalizing max slhc(x) to 1");
    add_mh(estimate_cmd, estimate.estimator.mh);
    add_likelihood(estimate_cmd, estimate.estimator.likelihood);

    auto* simulate_cmd = app.add_subcommand("simulate", "Simulation studies");
    simulate_cmd->require_subcommand(1);

    FrequencyOptions frequency;
    bool fixed_truth = false;
    auto* frequency_cmd = simulate_cmd->add_subcommand("frequency", "Structure frequency and rank study");
    frequency_cmd->add_option("--n", frequency.spec.n, "Points")->capture_default_str();
    frequency_cmd->add_option("--noise-std", frequency.spec.noise_std, "Noise standard deviation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    frequency_cmd->add_option("--measurements", frequency.spec.n_measurements, "Measurements")->capture_default_str();
    frequency_cmd->add_flag("--fixed-truth", fixed_truth, "Measure one ground-truth metric repeatedly");
    frequency_cmd->add_option("--out", global.output_dir, "Output directory")->capture_default_str();
    add_mh(frequency_cmd, frequency.spec.mh);

    CompareOptions compare;
    std::size_t structure_index = 0;
    auto* compare_cmd = simulate_cmd->add_subcommand("compare", "MLE versus SLHC success rates");
    compare_cmd->add_option("--n", compare.spec.n, "Points")->capture_default_str();
    compare_cmd->add_option("--noise-levels", compare.noise_levels, "Comma separated noise standard deviations")
        ->delimiter(',')
        ->capture_default_str();
    compare_cmd->add_option("--heights", compare.spec.n_heights, "Height vectors")->capture_default_str();
    compare_cmd->add_option("--per-height", compare.spec.per_height, "Measurements per height")
        ->capture_default_str();
    auto* index_opt =
        compare_cmd->add_option("--structure-index", structure_index, "Canonical index of the true structure");
    compare_cmd->add_option("--out", global.output_dir, "Output directory")->capture_default_str();
    add_mh(compare_cmd, compare.spec.mh);
    add_likelihood(compare_cmd, compare.spec.likelihood);

    std::size_t structures_n = 0;
    auto* structures_cmd = app.add_subcommand("structures", "Binary dendrogram structures");
    structures_cmd->require_subcommand(1);
    auto* count_cmd = structures_cmd->add_subcommand("count", "Number of structures on n leaves");
    count_cmd->add_option("--n", structures_n, "Points")->required();
    auto* list_cmd = structures_cmd->add_subcommand("list", "Structures on n leaves in canonical order");
    list_cmd->add_option("--n", structures_n, "Points")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "dendro-mle: " << e.what() << "\n" << "Run with --help for usage.\n";
        return kUsage;
    }

    global.log_level = log_level == "quiet" ? LogLevel::quiet : log_level == "debug" ? LogLevel::debug : LogLevel::info;
    if (global.threads) {
        set_thread_count(*global.threads == 0 ? std::nullopt : global.threads);
    }

    try {
        if (slhc_cmd->parsed()) {
            return cmd_slhc(slhc_input, out, err);
        }
        if (estimate_cmd->parsed()) {
            estimate.estimator.rescale = !no_rescale;
            return cmd_estimate(estimate, global, out, err);
        }
        if (frequency_cmd->parsed()) {
            frequency.spec.redraw_truth = !fixed_truth;
            return cmd_simulate_frequency(frequency, global, err);
        }
        if (compare_cmd->parsed()) {
            if (index_opt->count() > 0) {
                compare.spec.structure_index = structure_index;
            }
            return cmd_simulate_compare(compare, global, err);
        }
        if (count_cmd->parsed()) {
            return cmd_structures_count(structures_n, out, err);
        }
        if (list_cmd->parsed()) {
            return cmd_structures_list(structures_n, out, err);
        }
    } catch (const InsufficientSamples& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kInsufficientSamples;
    } catch (const DomainError& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "dendro-mle: " << e.what() << '\n';
        return kMalformedInput;
    }
    return kUsage;
}

}  // namespace dendro::cli
