#include "routescape/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "routescape/error.hpp"
#include "routescape/random.hpp"

namespace routescape {

namespace {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Every index is
// processed even if some fail; the exception of the lowest failing index is
// rethrown so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, std::size_t jobs, Body&& body) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

template <class Fn>
auto with_context(const std::string& context, Fn&& fn) {
    try {
        return fn();
    } catch (const DegenerateResultError& e) {
        throw DegenerateResultError(context + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(context + ": " + e.what());
    } catch (const ComputationError& e) {
        throw ComputationError(context + ": " + e.what());
    }
}

}  // namespace

void validate_walk_params(const WalkParams& params) {
    if (params.num_steps < 2) {
        throw ValidationError("walk length must be >= 2 steps");
    }
    if (params.num_walks < 1) {
        throw ValidationError("need at least one walk");
    }
    if (params.max_lag < 1 || params.max_lag >= params.num_steps) {
        throw ValidationError("max_lag must satisfy 1 <= max_lag < num_steps (" +
                              std::to_string(params.num_steps) + ")");
    }
}

std::uint64_t walk_seed(std::uint64_t base, std::size_t walk_index) {
    return derive_seed(base, walk_index);
}

WalkTrace random_walk(const FitnessModel& model, const WalkParams& params, std::size_t walk_index) {
    validate_walk_params(params);
    WalkTrace trace;
    trace.walk_index = walk_index;
    trace.seed = walk_seed(params.seed, walk_index);
    trace.samples.reserve(params.num_steps);

    Rng rng(trace.seed);
    RoutingConfiguration current = random_configuration(model.table, rng);
    for (std::size_t step = 0; step < params.num_steps; ++step) {
        if (step > 0) {
            neighbor_step_in_place(current, model.table, rng);
        }
        const double fitness =
            with_context("walk " + std::to_string(walk_index) + " step " + std::to_string(step),
                         [&] { return model.evaluate(current).mean_delay_s; });
        trace.samples.push_back({step, current, fitness});
    }
    return trace;
}

std::vector<WalkTrace> run_walks(const FitnessModel& model, const WalkParams& params,
                                 std::size_t jobs) {
    validate_walk_params(params);
    std::vector<WalkTrace> traces(params.num_walks);
    parallel_for(params.num_walks, jobs,
                 [&](std::size_t w) { traces[w] = random_walk(model, params, w); });
    return traces;
}

WalkTrace enumerate_landscape(const FitnessModel& model, std::uint64_t cap, std::size_t jobs) {
    const ConfigurationRange range = enumerate_all(model.table, cap);
    WalkTrace trace;
    trace.samples.reserve(range.size());
    std::size_t index = 0;
    for (const RoutingConfiguration& c : range) {
        trace.samples.push_back({index++, c, 0.0});
    }
    parallel_for(trace.samples.size(), jobs, [&](std::size_t i) {
        Sample& s = trace.samples[i];
        s.fitness = with_context("configuration " + std::to_string(i),
                                 [&] { return model.evaluate(s.config).mean_delay_s; });
    });
    return trace;
}

// ---------------------------------------------------------------------------

double fdc(std::span<const double> fitness, std::span<const double> distance) {
    if (fitness.size() != distance.size()) {
        throw UndefinedStatisticError("FDC needs equally many fitness and distance values");
    }
    if (fitness.size() < 2) {
        throw UndefinedStatisticError("FDC needs at least 2 samples, got " +
                                      std::to_string(fitness.size()));
    }
    // Single-pass co-moment updates.
    double mean_f = 0.0, mean_d = 0.0, m2_f = 0.0, m2_d = 0.0, c_fd = 0.0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double df = fitness[i] - mean_f;
        const double dd = distance[i] - mean_d;
        mean_f += df / n;
        mean_d += dd / n;
        m2_f += df * (fitness[i] - mean_f);
        m2_d += dd * (distance[i] - mean_d);
        c_fd += df * (distance[i] - mean_d);
    }
    if (!(m2_f > 0.0)) {
        throw UndefinedStatisticError("FDC undefined: fitness values have zero variance");
    }
    if (!(m2_d > 0.0)) {
        throw UndefinedStatisticError("FDC undefined: distances have zero variance");
    }
    // The 1/n factors of covariance and both deviations cancel.
    return std::clamp(c_fd / std::sqrt(m2_f * m2_d), -1.0, 1.0);
}

AutocorrSeries autocorrelation(std::span<const std::vector<double>> sequences, std::size_t max_lag) {
    AutocorrSeries out;
    double sum = 0.0;
    for (const auto& seq : sequences) {
        if (seq.size() <= max_lag) {
            throw UndefinedStatisticError("autocorrelation to lag " + std::to_string(max_lag) +
                                          " needs sequences longer than that, got length " +
                                          std::to_string(seq.size()));
        }
        out.samples += seq.size();
        sum += std::accumulate(seq.begin(), seq.end(), 0.0);
    }
    if (out.samples == 0) {
        throw UndefinedStatisticError("autocorrelation of an empty sample set");
    }
    const double total = static_cast<double>(out.samples);
    const double mean = sum / total;
    double var = 0.0;
    for (const auto& seq : sequences) {
        for (double f : seq) {
            var += (f - mean) * (f - mean);
        }
    }
    var /= total;
    if (!(var > 0.0)) {
        throw UndefinedStatisticError("autocorrelation undefined: fitness variance is zero");
    }

    out.r.assign(max_lag + 1, 0.0);
    out.pairs.assign(max_lag + 1, 0);
    out.r[0] = 1.0;
    out.pairs[0] = out.samples;
    for (std::size_t s = 1; s <= max_lag; ++s) {
        double acc = 0.0;
        for (const auto& seq : sequences) {
            for (std::size_t t = 0; t + s < seq.size(); ++t) {
                acc += (seq[t] - mean) * (seq[t + s] - mean);
            }
            out.pairs[s] += seq.size() - s;
        }
        out.r[s] = acc / total / var;
    }
    return out;
}

AutocorrSeries autocorrelation(std::span<const WalkTrace> traces, std::size_t max_lag) {
    std::vector<std::vector<double>> seqs;
    seqs.reserve(traces.size());
    for (const WalkTrace& t : traces) {
        auto& seq = seqs.emplace_back();
        seq.reserve(t.samples.size());
        for (const Sample& s : t.samples) {
            seq.push_back(s.fitness);
        }
    }
    return autocorrelation(std::span<const std::vector<double>>(seqs), max_lag);
}

std::string to_string(AutocorrShape shape) {
    switch (shape) {
        case AutocorrShape::random: return "random";
        case AutocorrShape::slow_decay: return "slow-decay";
        case AutocorrShape::fast_decay: return "fast-decay";
    }
    return "random";
}

std::optional<std::size_t> decay_lag(const AutocorrSeries& series, double level) {
    for (std::size_t s = 1; s < series.r.size(); ++s) {
        if (series.r[s] < level) {
            return s;
        }
    }
    return std::nullopt;
}

AutocorrShape classify_autocorr(const AutocorrSeries& series, const ClassifyParams& params) {
    const std::size_t max_lag = series.r.empty() ? 0 : series.r.size() - 1;
    const double band =
        params.noise_sigmas / std::sqrt(static_cast<double>(std::max<std::size_t>(series.samples, 1)));
    bool inside_band = true;
    for (std::size_t s = 1; s <= max_lag; ++s) {
        inside_band = inside_band && std::abs(series.r[s]) < band;
    }
    if (inside_band) {
        return AutocorrShape::random;
    }
    const auto lag = decay_lag(series, params.decay_level);
    if (lag && static_cast<double>(*lag) <= params.fast_fraction * static_cast<double>(max_lag)) {
        return AutocorrShape::fast_decay;
    }
    return AutocorrShape::slow_decay;
}

// ---------------------------------------------------------------------------

BestSample find_best(std::span<const WalkTrace> traces) {
    std::optional<BestSample> best;
    for (std::size_t w = 0; w < traces.size(); ++w) {
        for (const Sample& s : traces[w].samples) {
            if (!best || s.fitness < best->fitness) {
                best = BestSample{w, s.step, s.config, s.fitness};
            }
        }
    }
    if (!best) {
        throw UndefinedStatisticError("no samples to pick a best configuration from");
    }
    return *best;
}

std::vector<ScatterPoint> scatter_data(std::span<const WalkTrace> traces,
                                       const RoutingConfiguration& reference) {
    std::vector<ScatterPoint> points;
    for (const WalkTrace& t : traces) {
        for (const Sample& s : t.samples) {
            points.push_back({hamming_distance(s.config, reference), s.fitness});
        }
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const ScatterPoint& a, const ScatterPoint& b) { return a.fitness < b.fitness; });
    return points;
}

LandscapeStats analyze(std::span<const WalkTrace> traces, std::size_t max_lag,
                       const std::optional<RoutingConfiguration>& reference,
                       const ClassifyParams& classify) {
    if (traces.empty()) {
        throw UndefinedStatisticError("analysis needs at least one trace");
    }
    LandscapeStats stats;
    stats.walk_count = traces.size();
    stats.best = find_best(traces);
    stats.reference = reference.value_or(stats.best.config);
    stats.external_reference = reference.has_value();

    std::vector<double> f, d;
    for (const WalkTrace& t : traces) {
        for (const Sample& s : t.samples) {
            f.push_back(s.fitness);
            d.push_back(static_cast<double>(hamming_distance(s.config, stats.reference)));
        }
    }
    stats.sample_count = f.size();
    try {
        stats.fdc = fdc(f, d);
    } catch (const UndefinedStatisticError& e) {
        throw UndefinedStatisticError(std::string("fitness-distance correlation: ") + e.what());
    }
    try {
        stats.autocorr = autocorrelation(traces, max_lag);
    } catch (const UndefinedStatisticError& e) {
        throw UndefinedStatisticError(std::string("autocorrelation: ") + e.what());
    }
    for (std::size_t w = 0; w < traces.size(); ++w) {
        try {
            stats.per_walk_autocorr.push_back(autocorrelation(traces.subspan(w, 1), max_lag));
        } catch (const UndefinedStatisticError&) {
            // A single flat walk is reported as NaN rather than failing the pooled analysis.
            AutocorrSeries flat;
            flat.samples = traces[w].samples.size();
            flat.r.assign(max_lag + 1, std::numeric_limits<double>::quiet_NaN());
            flat.pairs.assign(max_lag + 1, 0);
            stats.per_walk_autocorr.push_back(std::move(flat));
        }
    }
    stats.shape = classify_autocorr(stats.autocorr, classify);
    stats.scatter = scatter_data(traces, stats.reference);
    return stats;
}

std::vector<std::vector<ScatterPoint>> scatter_per_walk(std::span<const WalkTrace> traces) {
    std::vector<std::vector<ScatterPoint>> out;
    out.reserve(traces.size());
    for (const WalkTrace& t : traces) {
        const std::span<const WalkTrace> one(&t, 1);
        out.push_back(scatter_data(one, find_best(one).config));
    }
    return out;
}

}  // namespace routescape
