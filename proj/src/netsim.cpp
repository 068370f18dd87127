#include "routescape/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>

#include "routescape/error.hpp"
#include "routescape/random.hpp"
#include "routescape/text.hpp"

namespace routescape {

std::string to_string(StartMode mode) {
    switch (mode) {
        case StartMode::stagger: return "stagger";
        case StartMode::jitter: return "jitter";
        case StartMode::none: return "none";
    }
    return "stagger";
}

StartMode parse_start_mode(const std::string& text) {
    if (text == "stagger") return StartMode::stagger;
    if (text == "jitter") return StartMode::jitter;
    if (text == "none") return StartMode::none;
    throw ValidationError("unknown start mode '" + text + "' (expected stagger, jitter, none)");
}

void validate_sim_params(const SimParams& params) {
    if (!std::isfinite(params.duration_s) || !std::isfinite(params.warmup_s)) {
        throw ValidationError("simulation duration and warmup must be finite");
    }
    if (!(params.warmup_s >= 0.0)) {
        throw ValidationError("warmup must be >= 0");
    }
    if (!(params.duration_s > params.warmup_s)) {
        throw ValidationError("simulation duration (" + text::format_double(params.duration_s) +
                              " s) must exceed warmup (" + text::format_double(params.warmup_s) +
                              " s)");
    }
}

double unloaded_delay(const Topology& topology, const Route& route, std::uint32_t packet_size_bytes) {
    const double bits = 8.0 * packet_size_bytes;
    double total = 0.0;
    for (std::size_t h = 0; h + 1 < route.size(); ++h) {
        const auto id = topology.find_link(route[h], route[h + 1]);
        if (!id) {
            throw ValidationError("route uses missing link " + std::to_string(route[h]) + "->" +
                                  std::to_string(route[h + 1]));
        }
        const Link& l = topology.link(*id);
        total += bits / l.capacity_bps + l.prop_delay_s;
    }
    return total;
}

namespace {

enum class EventKind : std::uint8_t { emit, tx_end, arrive };

struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    std::uint32_t target;  // flow, link or packet id depending on kind

    // std::priority_queue is a max-heap.
    friend bool operator<(const Event& a, const Event& b) {
        return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
};

enum class PacketState : std::uint8_t { in_flight, delivered, dropped };

struct Packet {
    std::uint32_t flow;
    std::uint32_t hop;  // index of the link being traversed or queued for
    std::uint64_t seq;
    double send_time;
    PacketState state;
};

struct LinkState {
    double capacity_bps;
    double prop_delay;
    std::deque<std::uint32_t> waiting;
    std::uint32_t on_wire = 0;
    bool busy = false;
    std::size_t peak = 0;
};

struct FlowPlan {
    std::vector<LinkId> links;
    double bits;
    double first_send;
    double interval;
};

class Simulator {
public:
    Simulator(const Topology& topology, std::vector<FlowPlan> plans, const SimParams& params)
        : params_(params), plans_(std::move(plans)) {
        links_.reserve(topology.links().size());
        for (const Link& l : topology.links()) {
            links_.push_back({l.capacity_bps, l.prop_delay_s, {}, 0, false, 0});
        }
        double expected = 0.0;
        for (const FlowPlan& f : plans_) {
            expected += std::max(0.0, (params_.duration_s - f.first_send) / f.interval) + 1.0;
        }
        packets_.reserve(static_cast<std::size_t>(std::min(expected, 5.0e7)));
    }

    SimResult run() {
        for (std::uint32_t f = 0; f < plans_.size(); ++f) {
            if (plans_[f].first_send < params_.duration_s) {
                schedule(plans_[f].first_send, EventKind::emit, f);
            }
        }
        std::vector<std::uint64_t> next_seq(plans_.size(), 0);
        result_.flows.assign(plans_.size(), {});
        std::vector<double> delay_sum(plans_.size(), 0.0);
        double total_delay = 0.0;

        while (!events_.empty() && events_.top().time <= params_.duration_s) {
            const Event ev = events_.top();
            events_.pop();
            now_ = ev.time;
            switch (ev.kind) {
                case EventKind::emit: {
                    const std::uint32_t f = ev.target;
                    const FlowPlan& plan = plans_[f];
                    const std::uint64_t k = next_seq[f]++;
                    const auto id = static_cast<std::uint32_t>(packets_.size());
                    packets_.push_back({f, 0, k, now_, PacketState::in_flight});
                    ++result_.flows[f].generated;
                    const double next = plan.first_send + static_cast<double>(k + 1) * plan.interval;
                    if (next < params_.duration_s) {
                        schedule(next, EventKind::emit, f);
                    }
                    enqueue(id);
                    break;
                }
                case EventKind::tx_end: {
                    LinkState& link = links_[ev.target];
                    schedule(now_ + link.prop_delay, EventKind::arrive, link.on_wire);
                    link.busy = false;
                    if (!link.waiting.empty()) {
                        const std::uint32_t next = link.waiting.front();
                        link.waiting.pop_front();
                        transmit(ev.target, next);
                    }
                    break;
                }
                case EventKind::arrive: {
                    Packet& p = packets_[ev.target];
                    const FlowPlan& plan = plans_[p.flow];
                    if (++p.hop < plan.links.size()) {
                        enqueue(ev.target);
                        break;
                    }
                    p.state = PacketState::delivered;
                    ++result_.delivered;
                    const double delay = now_ - p.send_time;
                    if (params_.record_packets) {
                        result_.packets.push_back({p.flow, p.seq, p.send_time, now_, p.hop});
                    }
                    if (p.send_time >= params_.warmup_s) {
                        FlowStats& fs = result_.flows[p.flow];
                        fs.min_delay_s = fs.measured == 0 ? delay : std::min(fs.min_delay_s, delay);
                        ++fs.measured;
                        delay_sum[p.flow] += delay;
                        total_delay += delay;
                        ++result_.measured;
                    }
                    break;
                }
            }
        }

        result_.generated = packets_.size();
        for (const Packet& p : packets_) {
            result_.in_flight += p.state == PacketState::in_flight;
        }
        for (std::size_t f = 0; f < plans_.size(); ++f) {
            FlowStats& fs = result_.flows[f];
            if (fs.measured > 0) {
                fs.mean_delay_s = delay_sum[f] / static_cast<double>(fs.measured);
            }
        }
        result_.peak_queue.reserve(links_.size());
        for (const LinkState& l : links_) {
            result_.peak_queue.push_back(l.peak);
        }
        if (result_.measured == 0) {
            throw DegenerateResultError("no packet sent after warmup was delivered before the end of "
                                        "the simulation");
        }
        result_.mean_delay_s = total_delay / static_cast<double>(result_.measured);
        return std::move(result_);
    }

private:
    void schedule(double time, EventKind kind, std::uint32_t target) {
        events_.push({time, event_seq_++, kind, target});
    }

    void enqueue(std::uint32_t packet) {
        Packet& p = packets_[packet];
        const LinkId id = plans_[p.flow].links[p.hop];
        LinkState& link = links_[id];
        if (!link.busy) {
            transmit(id, packet);
            return;
        }
        if (params_.queue_limit > 0 && link.waiting.size() >= params_.queue_limit) {
            p.state = PacketState::dropped;
            ++result_.dropped;
            return;
        }
        link.waiting.push_back(packet);
        link.peak = std::max(link.peak, link.waiting.size());
    }

    void transmit(LinkId id, std::uint32_t packet) {
        LinkState& link = links_[id];
        link.busy = true;
        link.on_wire = packet;
        const double bits = plans_[packets_[packet].flow].bits;
        schedule(now_ + bits / link.capacity_bps, EventKind::tx_end, id);
    }

    const SimParams& params_;
    std::vector<FlowPlan> plans_;
    std::vector<LinkState> links_;
    std::vector<Packet> packets_;
    std::priority_queue<Event> events_;
    std::uint64_t event_seq_ = 0;
    double now_ = 0.0;
    SimResult result_;
};

}  // namespace

SimResult simulate(const Topology& topology, const RouteTable& table,
                   const RoutingConfiguration& config, const TrafficPattern& traffic,
                   const SimParams& params) {
    validate_sim_params(params);
    validate_configuration(table, config);
    if (table.node_count() != topology.node_count()) {
        throw ValidationError("route table and topology disagree on node count");
    }
    validate_traffic(topology, traffic);

    Rng jitter_rng(params.seed);
    const auto flow_count = static_cast<double>(traffic.flows.size());
    std::vector<FlowPlan> plans;
    plans.reserve(traffic.flows.size());
    for (std::size_t j = 0; j < traffic.flows.size(); ++j) {
        const Flow& f = traffic.flows[j];
        std::size_t pair = 0;
        try {
            pair = table.pair_index(f.src, f.dst);
        } catch (const ValidationError&) {
            throw ValidationError("flow " + std::to_string(j) + " (" + std::to_string(f.src) + "->" +
                                  std::to_string(f.dst) + ") is not routable");
        }
        const Route& route = table.routes(pair)[config[pair]];
        FlowPlan plan;
        for (std::size_t h = 0; h + 1 < route.size(); ++h) {
            const auto id = topology.find_link(route[h], route[h + 1]);
            if (!id) {
                throw ValidationError("flow " + std::to_string(j) + " route uses missing link " +
                                      std::to_string(route[h]) + "->" + std::to_string(route[h + 1]));
            }
            plan.links.push_back(*id);
        }
        plan.bits = 8.0 * f.packet_size_bytes;
        plan.interval = f.interval_s;
        double offset = 0.0;
        switch (params.start_mode) {
            case StartMode::stagger:
                offset = f.interval_s * static_cast<double>(j) / flow_count;
                break;
            case StartMode::jitter:
                offset = uniform_unit(jitter_rng) * f.interval_s;
                break;
            case StartMode::none:
                break;
        }
        plan.first_send = f.start_time_s + offset;
        plans.push_back(std::move(plan));
    }
    return Simulator(topology, std::move(plans), params).run();
}

void write_packet_trace_csv(std::ostream& out, const SimResult& result) {
    out << "flow_id,seq,send_time,recv_time,delay,hops\n";
    for (const PacketRecord& p : result.packets) {
        out << p.flow << ',' << p.seq << ',' << text::format_double(p.send_time_s) << ','
            << text::format_double(p.recv_time_s) << ',' << text::format_double(p.delay_s()) << ','
            << p.hops << '\n';
    }
}

}  // namespace routescape
