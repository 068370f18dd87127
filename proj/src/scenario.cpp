#include "routescape/scenario.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "routescape/error.hpp"
#include "routescape/random.hpp"
#include "routescape/text.hpp"

namespace routescape {

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"scenario", {"name"}},
        {"topology", {"builder", "nodes", "capacity_bps", "prop_delay_s", "file", "max_hops"}},
        {"traffic", {"pattern", "hub", "direction", "packet_size_bytes", "interval_s"}},
        {"simulation", {"duration_s", "warmup_s", "queue_limit", "start_mode"}},
        {"walk", {"num_walks", "num_steps", "max_lag", "seed"}},
        {"analysis", {"noise_sigmas", "decay_level", "fast_fraction", "reference_config"}},
        {"enumerate", {"cap"}},
    };
    return keys;
}

class Section {
public:
    Section(const ptree& tree, std::string name) : name_(std::move(name)) {
        if (const auto child = tree.get_child_optional(name_)) {
            node_ = &*child;
        }
    }

    std::optional<std::string> text(const std::string& key) const {
        if (!node_) {
            return std::nullopt;
        }
        const auto v = node_->get_optional<std::string>(key);
        if (!v) {
            return std::nullopt;
        }
        return std::string(text::trim(*v));
    }

    std::string required_text(const std::string& key) const {
        auto v = text(key);
        if (!v || v->empty()) {
            throw ValidationError("scenario: missing [" + name_ + "] " + key);
        }
        return *v;
    }

    std::optional<double> real(const std::string& key) const {
        const auto v = text(key);
        if (!v) {
            return std::nullopt;
        }
        const auto d = text::parse_double(*v);
        if (!d) {
            throw ValidationError("scenario: [" + name_ + "] " + key + " = '" + *v +
                                  "' is not a number");
        }
        return d;
    }

    double required_real(const std::string& key) const {
        required_text(key);
        return *real(key);
    }

    std::optional<std::uint64_t> integer(const std::string& key) const {
        const auto v = text(key);
        if (!v) {
            return std::nullopt;
        }
        const auto n = text::parse_uint(*v);
        if (!n) {
            throw ValidationError("scenario: [" + name_ + "] " + key + " = '" + *v +
                                  "' is not a non-negative integer");
        }
        return n;
    }

    std::uint64_t required_integer(const std::string& key) const {
        required_text(key);
        return *integer(key);
    }

private:
    std::string name_;
    const ptree* node_ = nullptr;
};

void check_keys(const ptree& tree) {
    for (const auto& [section, body] : tree) {
        if (section == "manifest") {
            continue;  // provenance written by the CLI, ignored on load
        }
        const auto known = known_keys().find(section);
        if (known == known_keys().end() || !body.data().empty()) {
            throw ValidationError("scenario: unknown section or top-level key '" + section + "'");
        }
        for (const auto& [key, value] : body) {
            if (!known->second.contains(key)) {
                throw ValidationError("scenario: unknown key '" + key + "' in [" + section + "]");
            }
        }
    }
}

Topology build_topology(const TopologySpec& spec) {
    if (spec.builder == "cycle") {
        return build_cycle(spec.nodes, spec.link);
    }
    return load_topology(spec.file);
}

TrafficPattern build_traffic(const Topology& topology, const TrafficSpec& spec) {
    if (spec.pattern == "hotspot") {
        return hotspot_pattern(topology, spec.hub, spec.packet_size_bytes, spec.interval_s,
                               spec.direction);
    }
    return adjacent_pattern(topology, spec.packet_size_bytes, spec.interval_s);
}

WalkParams resolve_walk(const Scenario& s, const RouteTable& table) {
    WalkParams w = s.walk;
    if (!s.num_steps_given) {
        w.num_steps = 10 * table.pair_count();
    }
    validate_walk_params(w);
    return w;
}

}  // namespace

std::uint64_t simulation_seed(std::uint64_t base) {
    // Counter 2^63 keeps this stream apart from the per-walk seeds 0, 1, ...
    return derive_seed(base, std::uint64_t{1} << 63);
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir,
                        const std::string& default_name) {
    ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(e.line(), "scenario: " + e.message());
    }
    check_keys(tree);

    Scenario s;
    s.name = Section(tree, "scenario").text("name").value_or(default_name);

    const Section topo(tree, "topology");
    s.topology.builder = topo.required_text("builder");
    if (s.topology.builder == "cycle") {
        s.topology.nodes = topo.required_integer("nodes");
        s.topology.link.capacity_bps = topo.required_real("capacity_bps");
        s.topology.link.prop_delay_s = topo.required_real("prop_delay_s");
        if (topo.text("file")) {
            throw ValidationError("scenario: [topology] file is only valid with builder = file");
        }
    } else if (s.topology.builder == "file") {
        const std::filesystem::path file = topo.required_text("file");
        s.topology.file = file.is_absolute() ? file : base_dir / file;
        for (const char* key : {"nodes", "capacity_bps", "prop_delay_s"}) {
            if (topo.text(key)) {
                throw ValidationError(std::string("scenario: [topology] ") + key +
                                      " comes from the topology file when builder = file");
            }
        }
    } else {
        throw ValidationError("scenario: unknown topology builder '" + s.topology.builder +
                              "' (expected cycle or file)");
    }
    if (const auto hops = topo.integer("max_hops")) {
        s.topology.max_hops = static_cast<std::size_t>(*hops);
    }

    const Section traffic(tree, "traffic");
    s.traffic.pattern = traffic.required_text("pattern");
    if (s.traffic.pattern == "hotspot") {
        const auto hub = traffic.required_integer("hub");
        if (hub > UINT32_MAX) {
            throw ValidationError("scenario: [traffic] hub out of range");
        }
        s.traffic.hub = static_cast<NodeId>(hub);
        s.traffic.direction = parse_hub_direction(traffic.text("direction").value_or("both"));
    } else if (s.traffic.pattern == "adjacent") {
        if (traffic.text("hub") || traffic.text("direction")) {
            throw ValidationError("scenario: [traffic] hub/direction only apply to pattern = hotspot");
        }
    } else {
        throw ValidationError("scenario: unknown traffic pattern '" + s.traffic.pattern +
                              "' (expected hotspot or adjacent)");
    }
    const auto size = traffic.required_integer("packet_size_bytes");
    if (size == 0 || size > UINT32_MAX) {
        throw ValidationError("scenario: [traffic] packet_size_bytes must be in 1..2^32-1");
    }
    s.traffic.packet_size_bytes = static_cast<std::uint32_t>(size);
    s.traffic.interval_s = traffic.required_real("interval_s");
    if (!(s.traffic.interval_s > 0.0)) {
        throw ValidationError("scenario: [traffic] interval_s must be > 0");
    }

    const Section sim(tree, "simulation");
    s.sim.duration_s = sim.real("duration_s").value_or(s.sim.duration_s);
    s.sim.warmup_s = sim.real("warmup_s").value_or(s.sim.warmup_s);
    s.sim.queue_limit = static_cast<std::size_t>(sim.integer("queue_limit").value_or(0));
    s.sim.start_mode = parse_start_mode(sim.text("start_mode").value_or("stagger"));
    validate_sim_params(s.sim);

    const Section walk(tree, "walk");
    s.walk.num_walks = static_cast<std::size_t>(walk.integer("num_walks").value_or(s.walk.num_walks));
    if (const auto steps = walk.integer("num_steps")) {
        s.walk.num_steps = static_cast<std::size_t>(*steps);
        s.num_steps_given = true;
    }
    s.walk.max_lag = static_cast<std::size_t>(walk.integer("max_lag").value_or(s.walk.max_lag));
    s.walk.seed = walk.integer("seed").value_or(s.walk.seed);

    const Section analysis(tree, "analysis");
    s.classify.noise_sigmas = analysis.real("noise_sigmas").value_or(s.classify.noise_sigmas);
    s.classify.decay_level = analysis.real("decay_level").value_or(s.classify.decay_level);
    s.classify.fast_fraction = analysis.real("fast_fraction").value_or(s.classify.fast_fraction);
    if (!(s.classify.noise_sigmas > 0.0) || !(s.classify.fast_fraction > 0.0) ||
        !(s.classify.decay_level > 0.0 && s.classify.decay_level < 1.0)) {
        throw ValidationError("scenario: [analysis] thresholds out of range");
    }
    if (const auto ref = analysis.text("reference_config")) {
        s.reference = parse_configuration(*ref);
    }

    s.enumeration_cap = Section(tree, "enumerate").integer("cap").value_or(s.enumeration_cap);
    return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ValidationError("cannot open scenario file " + file.string());
    }
    try {
        return parse_scenario(in, file.parent_path(), file.stem().string());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), file.string() + ": " + e.what());
    }
}

void write_scenario(std::ostream& out, const Scenario& s, const std::string& topology_file,
                    const std::string& manifest_extra) {
    using text::format_double;
    out << "[scenario]\nname = " << s.name << "\n\n";
    out << "[topology]\nbuilder = file\nfile = " << topology_file << '\n';
    if (s.topology.max_hops) {
        out << "max_hops = " << *s.topology.max_hops << '\n';
    }
    out << "\n[traffic]\npattern = " << s.traffic.pattern << '\n';
    if (s.traffic.pattern == "hotspot") {
        out << "hub = " << s.traffic.hub << "\ndirection = " << to_string(s.traffic.direction) << '\n';
    }
    out << "packet_size_bytes = " << s.traffic.packet_size_bytes << '\n'
        << "interval_s = " << format_double(s.traffic.interval_s) << "\n\n";
    out << "[simulation]\nduration_s = " << format_double(s.sim.duration_s) << '\n'
        << "warmup_s = " << format_double(s.sim.warmup_s) << '\n'
        << "queue_limit = " << s.sim.queue_limit << '\n'
        << "start_mode = " << to_string(s.sim.start_mode) << "\n\n";
    out << "[walk]\nnum_walks = " << s.walk.num_walks << '\n'
        << "num_steps = " << s.walk.num_steps << '\n'
        << "max_lag = " << s.walk.max_lag << '\n'
        << "seed = " << s.walk.seed << "\n\n";
    out << "[analysis]\nnoise_sigmas = " << format_double(s.classify.noise_sigmas) << '\n'
        << "decay_level = " << format_double(s.classify.decay_level) << '\n'
        << "fast_fraction = " << format_double(s.classify.fast_fraction) << '\n';
    if (s.reference) {
        out << "reference_config = " << format_configuration(*s.reference) << '\n';
    }
    out << "\n[enumerate]\ncap = " << s.enumeration_cap << '\n';
    if (!manifest_extra.empty()) {
        out << "\n[manifest]\n" << manifest_extra;
    }
}

// ---------------------------------------------------------------------------

Experiment::Experiment(Scenario scenario)
    : scenario_(std::move(scenario)),
      topology_(build_topology(scenario_.topology)),
      table_(enumerate_routes(topology_, scenario_.topology.max_hops)),
      traffic_(build_traffic(topology_, scenario_.traffic)),
      walk_(resolve_walk(scenario_, table_)) {
    if (scenario_.reference) {
        validate_configuration(table_, *scenario_.reference);
    }
}

FitnessModel Experiment::model() const {
    SimParams sim = scenario_.sim;
    sim.seed = simulation_seed(walk_.seed);
    return FitnessModel{topology_, table_, traffic_, sim};
}

}  // namespace routescape
