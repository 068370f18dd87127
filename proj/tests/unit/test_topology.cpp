#include <doctest.h>

#include <set>
#include <sstream>

#include "routescape/error.hpp"
#include "routescape/random.hpp"
#include "routescape/topology.hpp"

using namespace routescape;

namespace {

const LinkParams ring_link{1.0e6, 0.010};

Topology parse(const std::string& text) {
    std::istringstream in(text);
    return parse_topology(in);
}

}  // namespace

TEST_CASE("build_cycle sizes") {
    const Topology six = build_cycle(6, ring_link);
    CHECK(six.node_count() == 6);
    CHECK(six.links().size() == 12);

    const Topology three = build_cycle(3, ring_link);
    CHECK(three.node_count() == 3);
    CHECK(three.links().size() == 6);

    CHECK_THROWS_AS(build_cycle(2, ring_link), TopologyError);
}

TEST_CASE("build_cycle links carry the builder parameters") {
    const Topology t = build_cycle(5, ring_link);
    for (const Link& l : t.links()) {
        CHECK(l.capacity_bps == 1.0e6);
        CHECK(l.prop_delay_s == 0.010);
        const auto gap = (l.dst + 5 - l.src) % 5;
        CHECK((gap == 1 || gap == 4));
        CHECK(t.find_link(l.dst, l.src).has_value());
    }
}

TEST_CASE("topology invariants are enforced") {
    CHECK_THROWS_AS(Topology(3, {{0, 0, 1e6, 0.0}}), TopologyError);
    CHECK_THROWS_AS(Topology(2, {{0, 1, 1e6, 0.0}, {0, 1, 1e6, 0.0}, {1, 0, 1e6, 0.0}}),
                    TopologyError);
    CHECK_THROWS_AS(Topology(2, {{0, 2, 1e6, 0.0}, {1, 0, 1e6, 0.0}}), TopologyError);
    CHECK_THROWS_AS(Topology(2, {{0, 1, 0.0, 0.0}, {1, 0, 1e6, 0.0}}), TopologyError);
    CHECK_THROWS_AS(Topology(2, {{0, 1, 1e6, -1.0}, {1, 0, 1e6, 0.0}}), TopologyError);
    // 0 -> 1 only: 1 cannot reach 0.
    CHECK_THROWS_AS(Topology(2, {{0, 1, 1e6, 0.0}}), TopologyError);
    // Two disjoint rings.
    CHECK_THROWS_AS(parse("nodes 4\nlink 0 1 1e6 0\nlink 2 3 1e6 0\n"), TopologyError);
}

TEST_CASE("load a six-node ring from text") {
    const Topology t = parse(
        "# six-node ring\n"
        "nodes 6\n"
        "link 0 1 1000000 0.01\n"
        "link 1 2 1000000 0.01\n"
        "\n"
        "link 2 3 1000000 0.01\n"
        "link 3 4 1000000 0.01\n"
        "  # indented comment\n"
        "link 4 5 1000000 0.01\n"
        "link 5 0 1e6 1e-2\n");
    CHECK(t == build_cycle(6, ring_link));
}

TEST_CASE("topology parse errors carry line numbers") {
    try {
        parse("nodes 3\nlink 0 1 1e6 0.01\nlink 1 7 1e6 0.01\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse("nodes 3\nlink 0 1 0 0.01\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse("link 0 1 1e6 0.01\n"), ParseError);
    CHECK_THROWS_AS(parse("nodes 3\nlink 0 1 1e6\n"), ParseError);
    CHECK_THROWS_AS(parse("nodes 3\nlink 0 1 fast 0.01\n"), ParseError);
    CHECK_THROWS_AS(parse("nodes 3\nedge 0 1 1e6 0.01\n"), ParseError);
    CHECK_THROWS_AS(parse("# nothing\n"), ParseError);
    CHECK_THROWS_AS(load_topology("/nonexistent/topology.txt"), ValidationError);
}

TEST_CASE("save/load round trip on random graphs") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + uniform_index(rng, 6);
        LinkParams p{1e5 * static_cast<double>(1 + uniform_index(rng, 100)),
                     uniform_unit(rng) * 0.05};
        const Topology ring = build_cycle(n, p);
        std::vector<Link> links(ring.links().begin(), ring.links().end());
        // Extra chords, some only in one direction and with odd parameters.
        for (int extra = 0; extra < 4; ++extra) {
            const auto a = static_cast<NodeId>(uniform_index(rng, n));
            const auto b = static_cast<NodeId>(uniform_index(rng, n));
            const bool exists = std::any_of(links.begin(), links.end(),
                                            [&](const Link& l) { return l.src == a && l.dst == b; });
            if (a != b && !exists) {
                links.push_back({a, b, 1234.5 + uniform_unit(rng), uniform_unit(rng) / 7.0});
            }
        }
        const Topology t(n, links);
        std::stringstream buf;
        save_topology(buf, t);
        CHECK(parse_topology(buf) == t);
    }
}

TEST_CASE("hot-spot pattern") {
    const Topology six = build_cycle(6, ring_link);
    const TrafficPattern p = hotspot_pattern(six, 0, 800, 0.01);
    CHECK(p.flows.size() == 10);
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Flow& f : p.flows) {
        CHECK((f.src == 0 || f.dst == 0));
        CHECK(f.src != f.dst);
        CHECK(f.packet_size_bytes == 800);
        CHECK(f.interval_s == 0.01);
        seen.insert({f.src, f.dst});
    }
    CHECK(seen.size() == 10);
    CHECK(p.description.find("both") != std::string::npos);

    CHECK(hotspot_pattern(build_cycle(3, ring_link), 1, 800, 0.01).flows.size() == 4);
    CHECK_THROWS_AS(hotspot_pattern(six, 9, 800, 0.01), ValidationError);

    const auto in = hotspot_pattern(six, 2, 800, 0.01, HubDirection::to_hub);
    CHECK(in.flows.size() == 5);
    for (const Flow& f : in.flows) {
        CHECK(f.dst == 2);
    }
    const auto out = hotspot_pattern(six, 2, 800, 0.01, HubDirection::from_hub);
    CHECK(out.flows.size() == 5);
    for (const Flow& f : out.flows) {
        CHECK(f.src == 2);
    }
}

TEST_CASE("adjacent pattern") {
    const Topology six = build_cycle(6, ring_link);
    const TrafficPattern p = adjacent_pattern(six, 800, 0.01);
    CHECK(p.flows.size() == 12);
    for (const Flow& f : p.flows) {
        CHECK(f.src != f.dst);
        CHECK(six.find_link(f.src, f.dst).has_value());
    }
    CHECK(adjacent_pattern(build_cycle(3, ring_link), 800, 0.01).flows.size() == 6);
}

TEST_CASE("pattern generators are deterministic") {
    const Topology six = build_cycle(6, ring_link);
    CHECK(hotspot_pattern(six, 3, 800, 0.01).flows == hotspot_pattern(six, 3, 800, 0.01).flows);
    CHECK(adjacent_pattern(six, 800, 0.01).flows == adjacent_pattern(six, 800, 0.01).flows);
}

TEST_CASE("traffic validation") {
    const Topology three = build_cycle(3, ring_link);
    CHECK_THROWS_AS(validate_traffic(three, {{{0, 0, 800, 0.01, 0.0}}, ""}), ValidationError);
    CHECK_THROWS_AS(validate_traffic(three, {{{0, 1, 0, 0.01, 0.0}}, ""}), ValidationError);
    CHECK_THROWS_AS(validate_traffic(three, {{{0, 1, 800, 0.0, 0.0}}, ""}), ValidationError);
    CHECK_THROWS_AS(validate_traffic(three, {{{0, 5, 800, 0.01, 0.0}}, ""}), ValidationError);
    CHECK_NOTHROW(validate_traffic(three, {{{0, 2, 800, 0.01, 0.0}}, ""}));
}
