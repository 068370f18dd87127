#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "routescape/random.hpp"
#include "routescape/topology.hpp"

namespace routescape {

/// Loop-free node sequence, source first.
using Route = std::vector<NodeId>;

/// An ordered source-destination pair and its position in configurations.
struct NodePair {
    NodeId src = 0;
    NodeId dst = 0;
};

/// Alternative routes for every ordered pair. Pair i follows source-major
/// order skipping the diagonal: (0,1), (0,2), ..., (1,0), (1,2), ...
/// Each pair's routes are sorted by hop count, then lexicographically.
class RouteTable {
public:
    RouteTable(std::size_t node_count, std::vector<std::vector<Route>> routes);

    std::size_t node_count() const noexcept { return node_count_; }
    /// N = n(n-1).
    std::size_t pair_count() const noexcept { return routes_.size(); }

    NodePair pair(std::size_t index) const;
    std::size_t pair_index(NodeId src, NodeId dst) const;

    std::span<const Route> routes(std::size_t pair_index) const { return routes_.at(pair_index); }
    std::size_t route_count(std::size_t pair_index) const { return routes_.at(pair_index).size(); }

    /// Pairs with at least two routes; the only ones a walk may toggle.
    const std::vector<std::size_t>& viable_pairs() const noexcept { return viable_; }

    friend bool operator==(const RouteTable& a, const RouteTable& b) {
        return a.node_count_ == b.node_count_ && a.routes_ == b.routes_;
    }

private:
    std::size_t node_count_;
    std::vector<std::vector<Route>> routes_;
    std::vector<std::size_t> viable_;
};

/// All simple paths for every ordered pair, optionally limited to
/// `max_hops` links. Throws InfeasiblePairError if some pair gets none.
RouteTable enumerate_routes(const Topology& topology, std::optional<std::size_t> max_hops = {});

/// CSV audit dump: pair_index,src,dst,route_index,node_sequence with the
/// node sequence written as space-separated ids.
void write_route_table_csv(std::ostream& out, const RouteTable& table);

using BigInt = boost::multiprecision::cpp_int;

/// Product of route counts over all pairs.
BigInt space_size(const RouteTable& table);

/// "1073741824 (2^30)" for powers of two, otherwise "<digits> (~2^<x.xx>)".
std::string describe_size(const BigInt& size);

// ---------------------------------------------------------------------------

/// One route index per pair.
struct RoutingConfiguration {
    std::vector<std::uint32_t> choice;

    std::size_t size() const noexcept { return choice.size(); }
    std::uint32_t operator[](std::size_t i) const { return choice[i]; }

    friend bool operator==(const RoutingConfiguration&, const RoutingConfiguration&) = default;
};

/// Space-separated route indices, e.g. "0 1 1 0".
std::string format_configuration(const RoutingConfiguration& config);
RoutingConfiguration parse_configuration(const std::string& text);

/// Throws ValidationError unless `config` has one in-range index per pair.
void validate_configuration(const RouteTable& table, const RoutingConfiguration& config);

/// Number of pairs whose selected routes differ. Throws ValidationError on
/// mismatched lengths.
std::size_t hamming_distance(const RoutingConfiguration& a, const RoutingConfiguration& b);

RoutingConfiguration random_configuration(const RouteTable& table, Rng& rng);

/// Moves to a uniformly chosen distance-1 neighbour: a uniformly chosen
/// viable pair gets one of its other routes, uniformly. Throws
/// ValidationError if the table has no viable pair.
RoutingConfiguration neighbor_step(const RoutingConfiguration& config, const RouteTable& table,
                                   Rng& rng);

/// In-place variant of neighbor_step; returns the pair that was changed.
std::size_t neighbor_step_in_place(RoutingConfiguration& config, const RouteTable& table, Rng& rng);

inline constexpr std::uint64_t default_enumeration_cap = std::uint64_t{1} << 24;

/// Mixed-radix sweep over every configuration, pair 0 as the least
/// significant digit. Starts at all zeros and ends at all (K_i - 1).
class ConfigurationRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = RoutingConfiguration;
        using difference_type = std::ptrdiff_t;
        using pointer = const RoutingConfiguration*;
        using reference = const RoutingConfiguration&;

        iterator() = default;

        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        void operator++(int) { ++*this; }

        friend bool operator==(const iterator& a, const iterator& b) {
            return a.done_ == b.done_ && (a.done_ || a.current_ == b.current_);
        }

    private:
        friend class ConfigurationRange;
        iterator(const RouteTable* table, bool done);

        const RouteTable* table_ = nullptr;
        RoutingConfiguration current_;
        bool done_ = true;
    };

    iterator begin() const { return iterator(table_, false); }
    iterator end() const { return iterator(table_, true); }

    std::uint64_t size() const noexcept { return size_; }

private:
    friend ConfigurationRange enumerate_all(const RouteTable&, std::uint64_t);
    ConfigurationRange(const RouteTable* table, std::uint64_t size) : table_(table), size_(size) {}

    const RouteTable* table_;
    std::uint64_t size_;
};

/// Brute-force sweep. Throws SpaceTooLargeError if space_size exceeds `cap`.
/// The table must outlive the returned range.
ConfigurationRange enumerate_all(const RouteTable& table,
                                 std::uint64_t cap = default_enumeration_cap);

}  // namespace routescape
