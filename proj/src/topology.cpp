#include "routescape/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "routescape/error.hpp"
#include "routescape/text.hpp"

namespace routescape {

namespace {

std::string link_name(const Link& l) {
    return std::to_string(l.src) + "->" + std::to_string(l.dst);
}

// Every node reachable from node 0 along forward links and along reversed
// links means every ordered pair is connected.
bool reaches_all(std::size_t n, const std::vector<std::vector<NodeId>>& adj) {
    std::vector<bool> seen(n, false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

}  // namespace

Topology::Topology(std::size_t node_count, std::vector<Link> links)
    : node_count_(node_count), links_(std::move(links)) {
    if (node_count_ < 2) {
        throw TopologyError("topology needs at least 2 nodes, got " + std::to_string(node_count_));
    }
    for (const Link& l : links_) {
        if (l.src >= node_count_ || l.dst >= node_count_) {
            throw TopologyError("link " + link_name(l) + " references an unknown node (nodes 0.." +
                                std::to_string(node_count_ - 1) + ")");
        }
        if (l.src == l.dst) {
            throw TopologyError("self loop at node " + std::to_string(l.src));
        }
        if (!(l.capacity_bps > 0.0) || !std::isfinite(l.capacity_bps)) {
            throw TopologyError("link " + link_name(l) + " has non-positive capacity");
        }
        if (!(l.prop_delay_s >= 0.0) || !std::isfinite(l.prop_delay_s)) {
            throw TopologyError("link " + link_name(l) + " has negative propagation delay");
        }
    }
    std::sort(links_.begin(), links_.end(), [](const Link& a, const Link& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (std::size_t i = 1; i < links_.size(); ++i) {
        if (links_[i].src == links_[i - 1].src && links_[i].dst == links_[i - 1].dst) {
            throw TopologyError("duplicate link " + link_name(links_[i]));
        }
    }

    out_offsets_.assign(node_count_ + 1, 0);
    for (const Link& l : links_) {
        ++out_offsets_[l.src + 1];
    }
    for (std::size_t i = 0; i < node_count_; ++i) {
        out_offsets_[i + 1] += out_offsets_[i];
    }
    out_ids_.resize(links_.size());
    for (std::size_t i = 0; i < links_.size(); ++i) {
        out_ids_[i] = static_cast<LinkId>(i);  // already grouped by src, sorted by dst
    }

    std::vector<std::vector<NodeId>> fwd(node_count_), rev(node_count_);
    for (const Link& l : links_) {
        fwd[l.src].push_back(l.dst);
        rev[l.dst].push_back(l.src);
    }
    if (!reaches_all(node_count_, fwd) || !reaches_all(node_count_, rev)) {
        throw TopologyError("topology is not connected: some ordered node pair has no path");
    }
}

std::span<const LinkId> Topology::out_links(NodeId node) const {
    if (node >= node_count_) {
        throw TopologyError("unknown node " + std::to_string(node));
    }
    return std::span<const LinkId>(out_ids_).subspan(out_offsets_[node],
                                                     out_offsets_[node + 1] - out_offsets_[node]);
}

std::optional<LinkId> Topology::find_link(NodeId src, NodeId dst) const {
    if (src >= node_count_) {
        return std::nullopt;
    }
    for (LinkId id : out_links(src)) {
        if (links_[id].dst == dst) {
            return id;
        }
    }
    return std::nullopt;
}

Topology build_cycle(std::size_t n, const LinkParams& params) {
    if (n < 3) {
        throw TopologyError("a cycle needs at least 3 nodes, got " + std::to_string(n));
    }
    std::vector<Link> links;
    links.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<NodeId>(i);
        const auto b = static_cast<NodeId>((i + 1) % n);
        links.push_back({a, b, params.capacity_bps, params.prop_delay_s});
        links.push_back({b, a, params.capacity_bps, params.prop_delay_s});
    }
    return Topology(n, std::move(links));
}

Topology parse_topology(std::istream& in) {
    std::optional<std::size_t> nodes;
    std::vector<Link> links;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = text::trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto tok = text::split_whitespace(body);
        if (tok[0] == "nodes") {
            if (nodes) {
                throw ParseError(line_no, "repeated 'nodes' header");
            }
            const auto n = tok.size() == 2 ? text::parse_uint(tok[1]) : std::nullopt;
            if (!n) {
                throw ParseError(line_no, "expected 'nodes <count>'");
            }
            nodes = static_cast<std::size_t>(*n);
        } else if (tok[0] == "link" || tok[0] == "dlink") {
            if (!nodes) {
                throw ParseError(line_no, "'nodes' header must precede link lines");
            }
            if (tok.size() != 5) {
                throw ParseError(line_no, "expected '" + std::string(tok[0]) +
                                              " <a> <b> <capacity_bps> <prop_delay_s>'");
            }
            const auto a = text::parse_uint(tok[1]);
            const auto b = text::parse_uint(tok[2]);
            const auto cap = text::parse_double(tok[3]);
            const auto delay = text::parse_double(tok[4]);
            if (!a || !b || !cap || !delay) {
                throw ParseError(line_no, "malformed number in link line");
            }
            if (*a >= *nodes || *b >= *nodes) {
                throw ParseError(line_no, "link references unknown node");
            }
            if (!(*cap > 0.0)) {
                throw ParseError(line_no, "link capacity must be > 0");
            }
            if (*delay < 0.0) {
                throw ParseError(line_no, "propagation delay must be >= 0");
            }
            const auto src = static_cast<NodeId>(*a);
            const auto dst = static_cast<NodeId>(*b);
            links.push_back({src, dst, *cap, *delay});
            if (tok[0] == "link") {
                links.push_back({dst, src, *cap, *delay});
            }
        } else {
            throw ParseError(line_no, "unknown directive '" + std::string(tok[0]) + "'");
        }
    }
    if (!nodes) {
        throw ParseError(line_no, "missing 'nodes' header");
    }
    return Topology(*nodes, std::move(links));
}

Topology load_topology(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ValidationError("cannot open topology file " + file.string());
    }
    try {
        return parse_topology(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), file.string() + ": " + e.what());
    }
}

void save_topology(std::ostream& out, const Topology& topology) {
    out << "nodes " << topology.node_count() << '\n';
    const auto links = topology.links();
    std::vector<bool> written(links.size(), false);
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (written[i]) {
            continue;
        }
        const Link& l = links[i];
        const auto back = topology.find_link(l.dst, l.src);
        const bool paired = back && !written[*back] && links[*back].capacity_bps == l.capacity_bps &&
                            links[*back].prop_delay_s == l.prop_delay_s;
        out << (paired ? "link " : "dlink ") << l.src << ' ' << l.dst << ' '
            << text::format_double(l.capacity_bps) << ' ' << text::format_double(l.prop_delay_s)
            << '\n';
        written[i] = true;
        if (paired) {
            written[*back] = true;
        }
    }
}

void save_topology(const std::filesystem::path& file, const Topology& topology) {
    std::ofstream out(file);
    if (!out) {
        throw ComputationError("cannot write topology file " + file.string());
    }
    save_topology(out, topology);
}

// ---------------------------------------------------------------------------

std::string to_string(HubDirection direction) {
    switch (direction) {
        case HubDirection::both: return "both";
        case HubDirection::to_hub: return "to-hub";
        case HubDirection::from_hub: return "from-hub";
    }
    return "both";
}

HubDirection parse_hub_direction(const std::string& text) {
    if (text == "both") return HubDirection::both;
    if (text == "to-hub") return HubDirection::to_hub;
    if (text == "from-hub") return HubDirection::from_hub;
    throw ValidationError("unknown hub direction '" + text + "' (expected both, to-hub, from-hub)");
}

void validate_traffic(const Topology& topology, const TrafficPattern& traffic) {
    for (std::size_t i = 0; i < traffic.flows.size(); ++i) {
        const Flow& f = traffic.flows[i];
        const std::string tag = "flow " + std::to_string(i) + ": ";
        if (!topology.has_node(f.src) || !topology.has_node(f.dst)) {
            throw ValidationError(tag + "endpoint not in topology");
        }
        if (f.src == f.dst) {
            throw ValidationError(tag + "source equals destination");
        }
        if (f.packet_size_bytes == 0) {
            throw ValidationError(tag + "packet size must be > 0");
        }
        if (!(f.interval_s > 0.0) || !std::isfinite(f.interval_s)) {
            throw ValidationError(tag + "interval must be > 0");
        }
        if (!(f.start_time_s >= 0.0) || !std::isfinite(f.start_time_s)) {
            throw ValidationError(tag + "start time must be >= 0");
        }
    }
}

TrafficPattern hotspot_pattern(const Topology& topology, NodeId hub,
                               std::uint32_t packet_size_bytes, double interval_s,
                               HubDirection direction) {
    if (!topology.has_node(hub)) {
        throw ValidationError("hot-spot hub " + std::to_string(hub) + " is not a node of the topology");
    }
    TrafficPattern p;
    const auto n = static_cast<NodeId>(topology.node_count());
    if (direction != HubDirection::from_hub) {
        for (NodeId v = 0; v < n; ++v) {
            if (v != hub) {
                p.flows.push_back({v, hub, packet_size_bytes, interval_s, 0.0});
            }
        }
    }
    if (direction != HubDirection::to_hub) {
        for (NodeId v = 0; v < n; ++v) {
            if (v != hub) {
                p.flows.push_back({hub, v, packet_size_bytes, interval_s, 0.0});
            }
        }
    }
    p.description = "hotspot hub=" + std::to_string(hub) + " direction=" + to_string(direction);
    validate_traffic(topology, p);
    return p;
}

TrafficPattern adjacent_pattern(const Topology& topology, std::uint32_t packet_size_bytes,
                                double interval_s) {
    TrafficPattern p;
    for (const Link& l : topology.links()) {
        p.flows.push_back({l.src, l.dst, packet_size_bytes, interval_s, 0.0});
    }
    p.description = "adjacent";
    validate_traffic(topology, p);
    return p;
}

}  // namespace routescape
