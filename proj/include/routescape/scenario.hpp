#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "routescape/landscape.hpp"
#include "routescape/netsim.hpp"
#include "routescape/routespace.hpp"
#include "routescape/topology.hpp"

namespace routescape {

struct TopologySpec {
    /// "cycle" or "file".
    std::string builder = "cycle";
    std::size_t nodes = 0;
    LinkParams link;
    /// Resolved against the scenario file's directory.
    std::filesystem::path file;
    std::optional<std::size_t> max_hops;
};

struct TrafficSpec {
    /// "hotspot" or "adjacent".
    std::string pattern;
    NodeId hub = 0;
    HubDirection direction = HubDirection::both;
    std::uint32_t packet_size_bytes = 0;
    double interval_s = 0.0;
};

/// A complete experiment description. See README for the file grammar.
struct Scenario {
    std::string name;
    TopologySpec topology;
    TrafficSpec traffic;
    SimParams sim;
    WalkParams walk;
    /// Walk length left unset means 10 steps per s-d pair.
    bool num_steps_given = false;
    ClassifyParams classify;
    std::uint64_t enumeration_cap = default_enumeration_cap;
    /// Optional distance reference replacing the best walk sample.
    std::optional<RoutingConfiguration> reference;
};

/// Parses the sectioned key = value format. Unknown sections or keys,
/// malformed numbers and missing required keys raise ValidationError (with
/// the line number when the syntax is at fault). Cross-module checks happen
/// in Experiment.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir,
                        const std::string& default_name);
Scenario load_scenario(const std::filesystem::path& file);

/// Scenario with every resolved value spelled out, the topology referenced
/// as a file named `topology_file` (relative to the written file), and a
/// [manifest] section carrying `extra` lines verbatim.
void write_scenario(std::ostream& out, const Scenario& scenario, const std::string& topology_file,
                    const std::string& manifest_extra = {});

/// A scenario resolved into the objects the simulator works on. Not movable:
/// model() hands out references to its members.
class Experiment {
public:
    /// Builds and cross-validates everything; throws ValidationError.
    explicit Experiment(Scenario scenario);

    Experiment(const Experiment&) = delete;
    Experiment& operator=(const Experiment&) = delete;

    const Scenario& scenario() const noexcept { return scenario_; }
    const Topology& topology() const noexcept { return topology_; }
    const RouteTable& table() const noexcept { return table_; }
    const TrafficPattern& traffic() const noexcept { return traffic_; }
    /// Walk parameters with the default length filled in.
    const WalkParams& walk() const noexcept { return walk_; }

    /// Fitness model. Every evaluation uses the same simulator seed so
    /// fitness is a function of the configuration alone.
    FitnessModel model() const;

private:
    Scenario scenario_;
    Topology topology_;
    RouteTable table_;
    TrafficPattern traffic_;
    WalkParams walk_;
};

/// Seed for start-time jitter, shared by every evaluation under `base`.
std::uint64_t simulation_seed(std::uint64_t base);

}  // namespace routescape
