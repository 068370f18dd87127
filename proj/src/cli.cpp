#include "routescape/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "routescape/error.hpp"
#include "routescape/landscape.hpp"
#include "routescape/scenario.hpp"
#include "routescape/text.hpp"

#ifndef ROUTESCAPE_VERSION
#define ROUTESCAPE_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace routescape::cli {

namespace {

std::shared_ptr<spdlog::logger> logger() {
    static const auto instance = [] {
        auto l = spdlog::stderr_color_mt("routescape");
        const char* env = std::getenv("ROUTESCAPE_LOG");
        l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
        l->set_pattern("[%l] %v");
        return l;
    }();
    return instance;
}

struct Options {
    std::string scenario;
    std::string out;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string enumerated_optimum;
    bool packet_trace = false;
};

/// Output directory written under a temporary name and renamed into place
/// on commit(); abandoned staging directories are removed.
class StagedOutput {
public:
    explicit StagedOutput(fs::path target) : target_(std::move(target)) {
        if (fs::exists(target_) && !fs::is_empty(target_) && !fs::exists(target_ / "manifest.ini")) {
            throw ValidationError("refusing to replace " + target_.string() +
                                  ": it exists and is not a previous routescape output");
        }
        const std::string suffix = "." + std::to_string(::getpid());
        staging_ = target_;
        staging_ += ".partial" + suffix;
        old_ = target_;
        old_ += ".old" + suffix;
        fs::remove_all(staging_);
        fs::create_directories(staging_);
    }

    StagedOutput(const StagedOutput&) = delete;
    StagedOutput& operator=(const StagedOutput&) = delete;

    ~StagedOutput() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    fs::path file(const std::string& name) const { return staging_ / name; }

    std::ofstream open(const std::string& name) const {
        std::ofstream out(file(name));
        if (!out) {
            throw ComputationError("cannot write " + file(name).string());
        }
        return out;
    }

    void commit() {
        if (fs::exists(target_)) {
            fs::rename(target_, old_);
        }
        fs::rename(staging_, target_);
        committed_ = true;
        std::error_code ec;
        fs::remove_all(old_, ec);
    }

private:
    fs::path target_;
    fs::path staging_;
    fs::path old_;
    bool committed_ = false;
};

Scenario load_with_overrides(const Options& opt) {
    Scenario s = load_scenario(opt.scenario);
    if (opt.seed) {
        s.walk.seed = *opt.seed;
    }
    return s;
}

fs::path output_dir(const Options& opt, const Scenario& s, const std::string& command) {
    if (!opt.out.empty()) {
        return opt.out;
    }
    return fs::path("results") / (s.name + (command == "walk" ? "" : "-" + command));
}

std::string manifest_lines(const std::string& command, const Scenario& s) {
    std::ostringstream m;
    m << "tool = routescape\n"
      << "tool_version = " << ROUTESCAPE_VERSION << '\n'
      << "command = " << command << '\n'
      << "base_seed = " << s.walk.seed << '\n'
      << "walk_seeds = derive_seed(base_seed, walk_index)\n"
      << "simulation_seed = " << simulation_seed(s.walk.seed) << '\n';
    return m.str();
}

void write_common(const StagedOutput& staged, const Experiment& exp, const std::string& command) {
    Scenario resolved = exp.scenario();
    resolved.walk = exp.walk();
    resolved.num_steps_given = true;
    save_topology(staged.file("topology.txt"), exp.topology());
    auto manifest = staged.open("manifest.ini");
    write_scenario(manifest, resolved, "topology.txt", manifest_lines(command, resolved));
    auto routes = staged.open("routes.csv");
    write_route_table_csv(routes, exp.table());
}

/// Lowest-fitness row of an enumeration CSV (earliest row on ties).
RoutingConfiguration read_enumerated_optimum(const fs::path& csv) {
    std::ifstream in(csv);
    if (!in) {
        throw ValidationError("cannot open enumeration file " + csv.string());
    }
    std::string line;
    std::getline(in, line);
    if (text::trim(line) != "config_index,config,fitness_seconds") {
        throw ValidationError(csv.string() + ": not an enumeration CSV");
    }
    std::optional<std::pair<double, RoutingConfiguration>> best;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        const auto first = line.find(',');
        const auto last = line.rfind(',');
        const auto fitness = first == last ? std::nullopt
                                           : text::parse_double(std::string_view(line).substr(last + 1));
        if (!fitness) {
            throw ParseError(line_no, csv.string() + ": malformed enumeration row");
        }
        if (!best || *fitness < best->first) {
            best.emplace(*fitness, parse_configuration(line.substr(first + 1, last - first - 1)));
        }
    }
    if (!best) {
        throw ValidationError(csv.string() + ": no enumeration rows");
    }
    return best->second;
}

void write_summary(std::ostream& out, const Experiment& exp, const LandscapeStats& stats) {
    using text::format_double;
    const auto lag = decay_lag(stats.autocorr, exp.scenario().classify.decay_level);
    const double band = exp.scenario().classify.noise_sigmas /
                        std::sqrt(static_cast<double>(stats.autocorr.samples));
    out << "scenario = " << exp.scenario().name << '\n'
        << "tool_version = " << ROUTESCAPE_VERSION << '\n'
        << "fdc = " << format_double(stats.fdc) << '\n'
        << "autocorr_shape = " << to_string(stats.shape) << '\n'
        << "decay_lag = " << (lag ? std::to_string(*lag) : std::string("none")) << '\n'
        << "noise_band = " << format_double(band) << '\n'
        << "max_lag = " << exp.walk().max_lag << '\n'
        << "best_fitness_seconds = " << format_double(stats.best.fitness) << '\n'
        << "best_walk = " << stats.best.walk << '\n'
        << "best_step = " << stats.best.step << '\n'
        << "best_config = " << format_configuration(stats.best.config) << '\n'
        << "reference = " << (stats.external_reference ? "enumerated-optimum" : "walk-best") << '\n'
        << "reference_config = " << format_configuration(stats.reference) << '\n'
        << "samples = " << stats.sample_count << '\n'
        << "walks = " << stats.walk_count << '\n'
        << "steps_per_walk = " << exp.walk().num_steps << '\n'
        << "pairs = " << exp.table().pair_count() << '\n'
        << "viable_pairs = " << exp.table().viable_pairs().size() << '\n'
        << "space_size = " << describe_size(space_size(exp.table())) << '\n'
        << "flows = " << exp.traffic().flows.size() << '\n'
        << "seed = " << exp.walk().seed << '\n';
}

int cmd_walk(const Options& opt, std::ostream& out) {
    Scenario scenario = load_with_overrides(opt);
    if (!opt.enumerated_optimum.empty()) {
        scenario.reference = read_enumerated_optimum(opt.enumerated_optimum);
    }
    const fs::path target = output_dir(opt, scenario, "walk");
    const Experiment exp(std::move(scenario));
    if (exp.table().viable_pairs().empty()) {
        throw ValidationError("every pair has a single route: nothing to walk over");
    }
    const FitnessModel model = exp.model();
    StagedOutput staged(target);

    logger()->info("{}: {} walks x {} steps on {} thread(s)", exp.scenario().name, exp.walk().num_walks,
                   exp.walk().num_steps, opt.jobs);
    const std::vector<WalkTrace> traces = run_walks(model, exp.walk(), opt.jobs);
    const LandscapeStats stats =
        analyze(traces, exp.walk().max_lag, exp.scenario().reference, exp.scenario().classify);
    logger()->info("fdc {} shape {}", stats.fdc, to_string(stats.shape));

    write_common(staged, exp, "walk");
    {
        auto csv = staged.open("correlation.csv");
        csv << "lag,r,samples_at_lag\n";
        for (std::size_t s = 0; s < stats.autocorr.r.size(); ++s) {
            csv << s << ',' << text::format_double(stats.autocorr.r[s]) << ','
                << stats.autocorr.pairs[s] << '\n';
        }
    }
    {
        auto csv = staged.open("correlation_per_walk.csv");
        csv << "walk,lag,r,samples_at_lag\n";
        for (std::size_t w = 0; w < stats.per_walk_autocorr.size(); ++w) {
            const AutocorrSeries& series = stats.per_walk_autocorr[w];
            for (std::size_t s = 0; s < series.r.size(); ++s) {
                csv << w << ',' << s << ',' << text::format_double(series.r[s]) << ','
                    << series.pairs[s] << '\n';
            }
        }
    }
    {
        auto csv = staged.open("scatter.csv");
        csv << "rank_by_fitness,hamming_distance_to_best,fitness_seconds\n";
        for (std::size_t i = 0; i < stats.scatter.size(); ++i) {
            csv << i + 1 << ',' << stats.scatter[i].distance << ','
                << text::format_double(stats.scatter[i].fitness) << '\n';
        }
    }
    {
        auto csv = staged.open("scatter_per_walk.csv");
        csv << "walk,rank_by_fitness,hamming_distance_to_walk_best,fitness_seconds\n";
        const auto per_walk = scatter_per_walk(traces);
        for (std::size_t w = 0; w < per_walk.size(); ++w) {
            const auto& points = per_walk[w];
            for (std::size_t i = 0; i < points.size(); ++i) {
                csv << w << ',' << i + 1 << ',' << points[i].distance << ','
                    << text::format_double(points[i].fitness) << '\n';
            }
        }
    }
    {
        auto csv = staged.open("samples.csv");
        csv << "walk,step,fitness_seconds,config\n";
        for (const WalkTrace& t : traces) {
            for (const Sample& s : t.samples) {
                csv << t.walk_index << ',' << s.step << ',' << text::format_double(s.fitness) << ','
                    << format_configuration(s.config) << '\n';
            }
        }
    }
    {
        auto summary = staged.open("summary.txt");
        write_summary(summary, exp, stats);
    }
    if (opt.packet_trace) {
        SimParams sim = model.sim;
        sim.record_packets = true;
        const SimResult best = simulate(exp.topology(), exp.table(), stats.best.config, exp.traffic(), sim);
        auto csv = staged.open("best_packets.csv");
        write_packet_trace_csv(csv, best);
    }
    staged.commit();

    out << "fdc = " << text::format_double(stats.fdc) << '\n'
        << "autocorr_shape = " << to_string(stats.shape) << '\n'
        << "best_fitness_seconds = " << text::format_double(stats.best.fitness) << '\n'
        << "output = " << target.string() << '\n';
    return exit_ok;
}

int cmd_enumerate(const Options& opt, std::ostream& out) {
    const Scenario scenario = load_with_overrides(opt);
    const fs::path target = output_dir(opt, scenario, "enumerate");
    const Experiment exp(scenario);
    const FitnessModel model = exp.model();
    // Checked before staging so a refusal leaves nothing behind.
    const std::uint64_t count = enumerate_all(exp.table(), exp.scenario().enumeration_cap).size();
    StagedOutput staged(target);

    logger()->info("{}: simulating {} configurations on {} thread(s)", exp.scenario().name, count, opt.jobs);
    const WalkTrace all = enumerate_landscape(model, exp.scenario().enumeration_cap, opt.jobs);
    const std::vector<WalkTrace> traces{all};
    const BestSample best = find_best(traces);

    write_common(staged, exp, "enumerate");
    {
        auto csv = staged.open("enumeration.csv");
        csv << "config_index,config,fitness_seconds\n";
        for (const Sample& s : all.samples) {
            csv << s.step << ',' << format_configuration(s.config) << ','
                << text::format_double(s.fitness) << '\n';
        }
    }
    {
        auto opt_file = staged.open("optimum.txt");
        opt_file << "scenario = " << exp.scenario().name << '\n'
                 << "config_index = " << best.step << '\n'
                 << "config = " << format_configuration(best.config) << '\n'
                 << "fitness_seconds = " << text::format_double(best.fitness) << '\n'
                 << "space_size = " << describe_size(space_size(exp.table())) << '\n';
    }
    staged.commit();

    out << "configurations = " << count << '\n'
        << "optimum_config = " << format_configuration(best.config) << '\n'
        << "optimum_fitness_seconds = " << text::format_double(best.fitness) << '\n'
        << "output = " << target.string() << '\n';
    return exit_ok;
}

int cmd_validate(const Options& opt, std::ostream& out) {
    const Experiment exp(load_with_overrides(opt));
    const RouteTable& table = exp.table();
    std::map<std::size_t, std::size_t> histogram;
    for (std::size_t i = 0; i < table.pair_count(); ++i) {
        ++histogram[table.route_count(i)];
    }
    out << "scenario: " << exp.scenario().name << '\n'
        << "nodes: " << exp.topology().node_count() << ", directed links: "
        << exp.topology().links().size() << '\n'
        << "N=" << table.pair_count() << " ordered pairs, " << table.viable_pairs().size()
        << " viable\n";
    for (const auto& [k, pairs] : histogram) {
        out << "  K=" << k << ": " << pairs << " pairs\n";
    }
    out << "size=" << describe_size(space_size(table)) << '\n'
        << "flows=" << exp.traffic().flows.size() << " (" << exp.traffic().description << ")\n"
        << "walks: " << exp.walk().num_walks << " x " << exp.walk().num_steps
        << " steps, max_lag " << exp.walk().max_lag << ", seed " << exp.walk().seed << '\n'
        << "simulation: " << text::format_double(exp.scenario().sim.duration_s) << " s, warmup "
        << text::format_double(exp.scenario().sim.warmup_s) << " s, queue_limit "
        << exp.scenario().sim.queue_limit << ", start " << to_string(exp.scenario().sim.start_mode)
        << '\n';
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random-walk landscape analysis of routing configurations", "routescape"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ROUTESCAPE_VERSION);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", opt.scenario, "Scenario file")->required();
        cmd->add_option("--seed", opt.seed, "Base seed (overrides the scenario)");
    };
    auto add_run = [&](CLI::App* cmd) {
        cmd->add_option("--out", opt.out, "Output directory (default results/<scenario>)");
        cmd->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    };
    CLI::App* walk = app.add_subcommand("walk", "Sample the landscape with random walks");
    add_common(walk);
    add_run(walk);
    walk->add_option("--use-enumerated-optimum", opt.enumerated_optimum,
                     "Measure distances against the optimum in an enumeration.csv");
    walk->add_flag("--packet-trace", opt.packet_trace, "Also write the packet trace of the best sample");
    CLI::App* enumerate = app.add_subcommand("enumerate", "Simulate every configuration");
    add_common(enumerate);
    add_run(enumerate);
    CLI::App* validate = app.add_subcommand("validate", "Check a scenario without simulating");
    add_common(validate);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_validation;
    }

    try {
        if (walk->parsed()) {
            return cmd_walk(opt, out);
        }
        if (enumerate->parsed()) {
            return cmd_enumerate(opt, out);
        }
        return cmd_validate(opt, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

}  // namespace routescape::cli
