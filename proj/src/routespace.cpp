#include "routescape/routespace.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "routescape/error.hpp"
#include "routescape/text.hpp"

namespace routescape {

RouteTable::RouteTable(std::size_t node_count, std::vector<std::vector<Route>> routes)
    : node_count_(node_count), routes_(std::move(routes)) {
    if (node_count_ < 2 || routes_.size() != node_count_ * (node_count_ - 1)) {
        throw ValidationError("route table must hold n(n-1) pairs");
    }
    for (std::size_t i = 0; i < routes_.size(); ++i) {
        const NodePair p = pair(i);
        if (routes_[i].empty()) {
            throw InfeasiblePairError(p.src, p.dst,
                                      "no route for pair " + std::to_string(p.src) + "->" +
                                          std::to_string(p.dst));
        }
        for (const Route& r : routes_[i]) {
            if (r.size() < 2 || r.front() != p.src || r.back() != p.dst) {
                throw ValidationError("route endpoints do not match pair " + std::to_string(i));
            }
        }
        if (routes_[i].size() >= 2) {
            viable_.push_back(i);
        }
    }
}

NodePair RouteTable::pair(std::size_t index) const {
    const std::size_t per_src = node_count_ - 1;
    const auto src = static_cast<NodeId>(index / per_src);
    auto dst = static_cast<NodeId>(index % per_src);
    if (dst >= src) {
        ++dst;
    }
    return {src, dst};
}

std::size_t RouteTable::pair_index(NodeId src, NodeId dst) const {
    if (src >= node_count_ || dst >= node_count_ || src == dst) {
        throw ValidationError("no pair " + std::to_string(src) + "->" + std::to_string(dst) +
                              " in route table");
    }
    return static_cast<std::size_t>(src) * (node_count_ - 1) + (dst < src ? dst : dst - 1);
}

namespace {

struct PathSearch {
    const Topology& topology;
    std::size_t max_hops;
    std::vector<std::vector<Route>>& by_dst;  // routes from the current source
    std::vector<bool> on_path;
    Route path;

    void extend() {
        const NodeId u = path.back();
        for (LinkId id : topology.out_links(u)) {
            const NodeId v = topology.link(id).dst;
            if (on_path[v]) {
                continue;
            }
            path.push_back(v);
            by_dst[v].push_back(path);
            if (path.size() - 1 < max_hops) {
                on_path[v] = true;
                extend();
                on_path[v] = false;
            }
            path.pop_back();
        }
    }
};

bool canonical_less(const Route& a, const Route& b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a < b;
}

}  // namespace

RouteTable enumerate_routes(const Topology& topology, std::optional<std::size_t> max_hops) {
    const std::size_t n = topology.node_count();
    if (max_hops && *max_hops == 0) {
        throw ValidationError("max_hops must be >= 1");
    }
    std::vector<std::vector<Route>> table;
    table.reserve(n * (n - 1));
    for (NodeId s = 0; s < n; ++s) {
        std::vector<std::vector<Route>> by_dst(n);
        PathSearch search{topology, max_hops.value_or(n - 1), by_dst, std::vector<bool>(n, false),
                          Route{s}};
        search.on_path[s] = true;
        search.extend();
        for (NodeId d = 0; d < n; ++d) {
            if (d == s) {
                continue;
            }
            auto& routes = by_dst[d];
            std::sort(routes.begin(), routes.end(), canonical_less);
            if (routes.empty()) {
                throw InfeasiblePairError(
                    s, d,
                    "pair " + std::to_string(s) + "->" + std::to_string(d) + " has no route" +
                        (max_hops ? " within " + std::to_string(*max_hops) + " hops" : ""));
            }
            table.push_back(std::move(routes));
        }
    }
    return RouteTable(n, std::move(table));
}

void write_route_table_csv(std::ostream& out, const RouteTable& table) {
    out << "pair_index,src,dst,route_index,node_sequence\n";
    for (std::size_t i = 0; i < table.pair_count(); ++i) {
        const NodePair p = table.pair(i);
        const auto routes = table.routes(i);
        for (std::size_t k = 0; k < routes.size(); ++k) {
            out << i << ',' << p.src << ',' << p.dst << ',' << k << ',';
            for (std::size_t j = 0; j < routes[k].size(); ++j) {
                out << (j ? " " : "") << routes[k][j];
            }
            out << '\n';
        }
    }
}

BigInt space_size(const RouteTable& table) {
    BigInt size = 1;
    for (std::size_t i = 0; i < table.pair_count(); ++i) {
        size *= table.route_count(i);
    }
    return size;
}

std::string describe_size(const BigInt& size) {
    std::string digits = size.str();
    if (size > 0 && (size & (size - 1)) == 0) {
        return digits + " (2^" + std::to_string(boost::multiprecision::msb(size)) + ")";
    }
    const double log2 = size > 0 ? std::log2(size.convert_to<double>()) : 0.0;
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << log2;
    return digits + " (~2^" + os.str() + ")";
}

// ---------------------------------------------------------------------------

std::string format_configuration(const RoutingConfiguration& config) {
    std::string out;
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (i) {
            out += ' ';
        }
        out += std::to_string(config[i]);
    }
    return out;
}

RoutingConfiguration parse_configuration(const std::string& text) {
    RoutingConfiguration config;
    for (auto tok : text::split_whitespace(text)) {
        const auto v = text::parse_uint(tok);
        if (!v || *v > UINT32_MAX) {
            throw ValidationError("malformed route index '" + std::string(tok) + "' in configuration");
        }
        config.choice.push_back(static_cast<std::uint32_t>(*v));
    }
    return config;
}

void validate_configuration(const RouteTable& table, const RoutingConfiguration& config) {
    if (config.size() != table.pair_count()) {
        throw ValidationError("configuration has " + std::to_string(config.size()) +
                              " entries, expected " + std::to_string(table.pair_count()));
    }
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (config[i] >= table.route_count(i)) {
            throw ValidationError("configuration entry " + std::to_string(i) + " = " +
                                  std::to_string(config[i]) + " is out of range (K = " +
                                  std::to_string(table.route_count(i)) + ")");
        }
    }
}

std::size_t hamming_distance(const RoutingConfiguration& a, const RoutingConfiguration& b) {
    if (a.size() != b.size()) {
        throw ValidationError("hamming_distance: configurations of length " +
                              std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += a[i] != b[i];
    }
    return d;
}

RoutingConfiguration random_configuration(const RouteTable& table, Rng& rng) {
    RoutingConfiguration config;
    config.choice.resize(table.pair_count());
    for (std::size_t i = 0; i < table.pair_count(); ++i) {
        const auto k = table.route_count(i);
        config.choice[i] = k == 1 ? 0 : static_cast<std::uint32_t>(uniform_index(rng, k));
    }
    return config;
}

std::size_t neighbor_step_in_place(RoutingConfiguration& config, const RouteTable& table, Rng& rng) {
    const auto& viable = table.viable_pairs();
    if (viable.empty()) {
        throw ValidationError("configuration space has a single point: no pair has two routes");
    }
    const std::size_t pair = viable[uniform_index(rng, viable.size())];
    const auto k = table.route_count(pair);
    // Draw among the K-1 other indices and skip over the current one.
    auto next = static_cast<std::uint32_t>(uniform_index(rng, k - 1));
    if (next >= config.choice.at(pair)) {
        ++next;
    }
    config.choice[pair] = next;
    return pair;
}

RoutingConfiguration neighbor_step(const RoutingConfiguration& config, const RouteTable& table,
                                   Rng& rng) {
    RoutingConfiguration next = config;
    neighbor_step_in_place(next, table, rng);
    return next;
}

// ---------------------------------------------------------------------------

ConfigurationRange::iterator::iterator(const RouteTable* table, bool done)
    : table_(table), done_(done) {
    if (!done_) {
        current_.choice.assign(table_->pair_count(), 0);
    }
}

ConfigurationRange::iterator& ConfigurationRange::iterator::operator++() {
    for (std::size_t i = 0; i < current_.size(); ++i) {
        if (current_.choice[i] + 1 < table_->route_count(i)) {
            ++current_.choice[i];
            return *this;
        }
        current_.choice[i] = 0;
    }
    done_ = true;
    current_.choice.clear();
    return *this;
}

ConfigurationRange enumerate_all(const RouteTable& table, std::uint64_t cap) {
    const BigInt size = space_size(table);
    if (size > cap) {
        throw SpaceTooLargeError(describe_size(size),
                                 "configuration space size " + describe_size(size) +
                                     " exceeds the enumeration cap " + std::to_string(cap));
    }
    return ConfigurationRange(&table, size.convert_to<std::uint64_t>());
}

}  // namespace routescape
