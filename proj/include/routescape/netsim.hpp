#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "routescape/routespace.hpp"
#include "routescape/topology.hpp"

namespace routescape {

/// How flow start times are offset from each flow's configured start.
enum class StartMode {
    /// Flow j of F starts interval * j / F later.
    stagger,
    /// Uniform offset in [0, interval) drawn from `seed`.
    jitter,
    /// Flows start exactly at their configured start time.
    none,
};

std::string to_string(StartMode mode);
StartMode parse_start_mode(const std::string& text);

struct SimParams {
    double duration_s = 30.0;
    /// Packets sent before this are simulated but not measured.
    double warmup_s = 5.0;
    /// Waiting room per directed link, excluding the packet on the wire.
    /// 0 means unbounded.
    std::size_t queue_limit = 0;
    StartMode start_mode = StartMode::stagger;
    std::uint64_t seed = 0;
    bool record_packets = false;
};

/// Throws ValidationError unless duration > warmup >= 0.
void validate_sim_params(const SimParams& params);

struct FlowStats {
    std::uint64_t generated = 0;
    std::uint64_t measured = 0;
    /// Mean and minimum delay over measured packets; 0 when none.
    double mean_delay_s = 0.0;
    double min_delay_s = 0.0;
};

struct PacketRecord {
    std::uint32_t flow = 0;
    std::uint64_t seq = 0;
    double send_time_s = 0.0;
    double recv_time_s = 0.0;
    std::uint32_t hops = 0;

    double delay_s() const noexcept { return recv_time_s - send_time_s; }
};

struct SimResult {
    /// Fitness: mean end-to-end delay of delivered packets sent at or after
    /// the warmup.
    double mean_delay_s = 0.0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_flight = 0;
    /// Packets contributing to mean_delay_s.
    std::uint64_t measured = 0;
    std::vector<FlowStats> flows;
    /// Largest waiting-queue length seen on each directed link (by LinkId).
    std::vector<std::size_t> peak_queue;
    /// Delivered packets in delivery order; filled only with record_packets.
    std::vector<PacketRecord> packets;
};

/// Event-driven CBR simulation of `traffic` routed by `config`. Every hop is
/// a FIFO output queue, a transmission of size/capacity seconds, then the
/// link's propagation delay. Nodes forward instantly. Events at equal times
/// are processed in creation order, so results are a pure function of the
/// inputs. Throws ValidationError for flows without a pair in `table` or an
/// invalid configuration, DegenerateResultError if nothing was measured.
SimResult simulate(const Topology& topology, const RouteTable& table,
                   const RoutingConfiguration& config, const TrafficPattern& traffic,
                   const SimParams& params);

/// Sum of per-hop transmission and propagation times: the delay of a packet
/// that never queues.
double unloaded_delay(const Topology& topology, const Route& route, std::uint32_t packet_size_bytes);

/// flow_id,seq,send_time,recv_time,delay,hops
void write_packet_trace_csv(std::ostream& out, const SimResult& result);

}  // namespace routescape
