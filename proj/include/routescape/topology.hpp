#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace routescape {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

/// One direction of a physical link. Each directed entry gets its own FIFO
/// output queue in the simulator; the two directions share nothing.
struct Link {
    NodeId src = 0;
    NodeId dst = 0;
    double capacity_bps = 0.0;
    double prop_delay_s = 0.0;

    friend bool operator==(const Link&, const Link&) = default;
};

/// Parameters for links created by the builders.
struct LinkParams {
    double capacity_bps = 0.0;
    double prop_delay_s = 0.0;
};

/// Immutable, validated network graph. Links are stored sorted by (src, dst)
/// and addressed by their position in that order.
class Topology {
public:
    /// Validates and takes ownership. Throws TopologyError on self loops,
    /// duplicate (src, dst) entries, unknown node ids, non-positive capacity,
    /// negative delay, or a graph that is not strongly connected.
    Topology(std::size_t node_count, std::vector<Link> links);

    std::size_t node_count() const noexcept { return node_count_; }
    std::span<const Link> links() const noexcept { return links_; }
    const Link& link(LinkId id) const { return links_.at(id); }

    /// Outgoing link ids of a node, ordered by destination.
    std::span<const LinkId> out_links(NodeId node) const;

    std::optional<LinkId> find_link(NodeId src, NodeId dst) const;

    bool has_node(std::size_t node) const noexcept { return node < node_count_; }

    friend bool operator==(const Topology& a, const Topology& b) {
        return a.node_count_ == b.node_count_ && a.links_ == b.links_;
    }

private:
    std::size_t node_count_;
    std::vector<Link> links_;
    std::vector<std::size_t> out_offsets_;  // CSR index into out_ids_
    std::vector<LinkId> out_ids_;
};

/// Ring 0-1-...-(n-1)-0 with a bidirectional link between neighbours.
Topology build_cycle(std::size_t n, const LinkParams& params);

/// Parse the line-oriented topology format:
///
///     # comment
///     nodes <n>
///     link  <a> <b> <capacity_bps> <prop_delay_s>   (both directions)
///     dlink <a> <b> <capacity_bps> <prop_delay_s>   (a -> b only)
///
/// `nodes` must come before any link line. Errors carry the line number.
Topology parse_topology(std::istream& in);
Topology load_topology(const std::filesystem::path& file);

/// Writes `link` lines for direction pairs with identical parameters and
/// `dlink` lines for the rest; parse_topology(save) reproduces the input.
void save_topology(std::ostream& out, const Topology& topology);
void save_topology(const std::filesystem::path& file, const Topology& topology);

// ---------------------------------------------------------------------------
// Traffic demand

struct Flow {
    NodeId src = 0;
    NodeId dst = 0;
    std::uint32_t packet_size_bytes = 0;
    double interval_s = 0.0;
    double start_time_s = 0.0;

    friend bool operator==(const Flow&, const Flow&) = default;
};

enum class HubDirection { both, to_hub, from_hub };

std::string to_string(HubDirection direction);
HubDirection parse_hub_direction(const std::string& text);

/// CBR flows. `description` records how the pattern was generated (pattern
/// name, hub, direction convention) and ends up in run manifests.
struct TrafficPattern {
    std::vector<Flow> flows;
    std::string description;
};

/// Throws ValidationError if a flow violates its invariants or names a node
/// outside the topology.
void validate_traffic(const Topology& topology, const TrafficPattern& traffic);

/// Logical star around `hub`. With HubDirection::both this yields the n-1
/// flows towards the hub followed by the n-1 flows leaving it.
TrafficPattern hotspot_pattern(const Topology& topology, NodeId hub,
                               std::uint32_t packet_size_bytes, double interval_s,
                               HubDirection direction = HubDirection::both);

/// One flow along every directed link, in link order.
TrafficPattern adjacent_pattern(const Topology& topology, std::uint32_t packet_size_bytes,
                                double interval_s);

}  // namespace routescape
