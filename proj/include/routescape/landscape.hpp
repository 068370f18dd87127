#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "routescape/netsim.hpp"
#include "routescape/routespace.hpp"
#include "routescape/topology.hpp"

namespace routescape {

/// Everything needed to map a configuration to its fitness.
struct FitnessModel {
    const Topology& topology;
    const RouteTable& table;
    const TrafficPattern& traffic;
    SimParams sim;

    /// Mean packet delay of `config`; lower is better.
    SimResult evaluate(const RoutingConfiguration& config) const {
        return simulate(topology, table, config, traffic, sim);
    }
};

struct WalkParams {
    std::size_t num_steps = 300;
    std::size_t num_walks = 5;
    std::uint64_t seed = 1;
    std::size_t max_lag = 50;
};

/// num_steps >= 2, num_walks >= 1, 1 <= max_lag < num_steps.
void validate_walk_params(const WalkParams& params);

struct Sample {
    std::size_t step = 0;
    RoutingConfiguration config;
    double fitness = 0.0;
};

struct WalkTrace {
    std::size_t walk_index = 0;
    std::uint64_t seed = 0;
    std::vector<Sample> samples;

    const RoutingConfiguration& initial() const { return samples.front().config; }
};

/// Seed of walk `walk_index` under base seed `base`.
std::uint64_t walk_seed(std::uint64_t base, std::size_t walk_index);

/// Random configuration followed by num_steps - 1 uniform neighbour moves,
/// with the fitness of every visited point. Simulation failures are
/// rethrown with the walk and step attached.
WalkTrace random_walk(const FitnessModel& model, const WalkParams& params, std::size_t walk_index);

/// All walks of `params`, run on up to `jobs` threads. The result does not
/// depend on `jobs`.
std::vector<WalkTrace> run_walks(const FitnessModel& model, const WalkParams& params,
                                 std::size_t jobs = 1);

/// Fitness of every configuration in mixed-radix order, packaged as one
/// trace with step = enumeration index. Consecutive samples are not
/// neighbours. Throws SpaceTooLargeError above `cap`.
WalkTrace enumerate_landscape(const FitnessModel& model, std::uint64_t cap = default_enumeration_cap,
                              std::size_t jobs = 1);

// ---------------------------------------------------------------------------
// Statistics

/// Fitness-distance correlation C_FD / (S_F S_D) with population moments,
/// i.e. the Pearson correlation of F and D. Throws UndefinedStatisticError
/// for fewer than 2 samples, mismatched sizes or zero variance.
double fdc(std::span<const double> fitness, std::span<const double> distance);

struct AutocorrSeries {
    /// r[s] for s = 0..max_lag.
    std::vector<double> r;
    /// Number of (t, t+s) pairs contributing at each lag.
    std::vector<std::size_t> pairs;
    /// Total pooled sample count.
    std::size_t samples = 0;
};

/// Random-walk autocorrelation pooled over several sequences. Values are
/// centred on the pooled mean and scaled by the pooled variance; the lag-s
/// sum of products runs over every valid (t, t+s) inside each sequence and
/// is divided by the total sample count, so r(0) = 1 and |r(s)| <= 1.
/// Throws UndefinedStatisticError on zero pooled variance or a sequence not
/// longer than max_lag.
AutocorrSeries autocorrelation(std::span<const std::vector<double>> sequences, std::size_t max_lag);
AutocorrSeries autocorrelation(std::span<const WalkTrace> traces, std::size_t max_lag);

enum class AutocorrShape { random, slow_decay, fast_decay };

std::string to_string(AutocorrShape shape);

struct ClassifyParams {
    /// Band half-width in units of 1/sqrt(samples).
    double noise_sigmas = 3.0;
    /// Correlation level that marks decorrelation.
    double decay_level = std::exp(-1.0);
    /// Fast decay if the decay level is crossed within this fraction of max_lag.
    double fast_fraction = 0.1;
};

/// random: every |r(s)|, s >= 1, inside the noise band. Otherwise
/// fast_decay when r first drops below decay_level at a lag no larger than
/// fast_fraction * max_lag, slow_decay when later or never.
AutocorrShape classify_autocorr(const AutocorrSeries& series, const ClassifyParams& params = {});

/// First lag s >= 1 with r(s) < level, if any.
std::optional<std::size_t> decay_lag(const AutocorrSeries& series, double level);

struct BestSample {
    std::size_t walk = 0;
    std::size_t step = 0;
    RoutingConfiguration config;
    double fitness = 0.0;
};

/// Minimum fitness; ties go to the earliest walk, then the earliest step.
BestSample find_best(std::span<const WalkTrace> traces);

struct ScatterPoint {
    std::size_t distance = 0;
    double fitness = 0.0;
};

/// (distance to `reference`, fitness) for every sample, sorted by ascending
/// fitness. Equal fitness keeps trace order.
std::vector<ScatterPoint> scatter_data(std::span<const WalkTrace> traces,
                                       const RoutingConfiguration& reference);

/// scatter_data of each trace alone, measured against that trace's own best.
std::vector<std::vector<ScatterPoint>> scatter_per_walk(std::span<const WalkTrace> traces);

struct LandscapeStats {
    double fdc = 0.0;
    AutocorrSeries autocorr;
    /// Same estimator applied to each trace alone.
    std::vector<AutocorrSeries> per_walk_autocorr;
    AutocorrShape shape = AutocorrShape::random;
    BestSample best;
    /// Configuration distances are measured against: the best sample unless
    /// an external optimum was supplied.
    RoutingConfiguration reference;
    bool external_reference = false;
    std::vector<ScatterPoint> scatter;
    std::size_t sample_count = 0;
    std::size_t walk_count = 0;
};

/// Best sample, FDC against it (or against `reference`), pooled and per-walk
/// autocorrelation, shape label and scatter data.
LandscapeStats analyze(std::span<const WalkTrace> traces, std::size_t max_lag,
                       const std::optional<RoutingConfiguration>& reference = {},
                       const ClassifyParams& classify = {});

}  // namespace routescape
