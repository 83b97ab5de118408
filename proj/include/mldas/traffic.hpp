#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mldas/errors.hpp"
#include "mldas/flow.hpp"
#include "mldas/rng.hpp"

namespace mldas {

enum class AttackKind { IcmpFlood = 0, UdpFlood = 1, TcpSynFlood = 2, LandFlood = 3 };

inline const char* attack_kind_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::IcmpFlood: return "icmp_flood";
        case AttackKind::UdpFlood: return "udp_flood";
        case AttackKind::TcpSynFlood: return "tcp_syn_flood";
        case AttackKind::LandFlood: return "land_flood";
    }
    return "?";
}

struct AttackEntry {
    AttackKind kind = AttackKind::IcmpFlood;
    int attacker_host = 0;
    int victim_host = 1;
    double start = 0.0;  // seconds
    double end = 0.0;
    bool spoofed = true;
    std::size_t flow_count = 0;  // 0 = derive from attack_rate * duration
};

struct AttackSchedule {
    std::vector<AttackEntry> entries;
};

inline void validate_schedule(const AttackSchedule& schedule) {
    double prev_start = -1e300;
    for (const AttackEntry& e : schedule.entries) {
        if (!(e.start < e.end)) throw ConfigError("attack schedule entry with start >= end");
        if (e.start < prev_start) throw ConfigError("attack schedule entries must be sorted by start");
        prev_start = e.start;
    }
}

/// Generator knobs. The legitimate script mirrors the six-step traffic
/// routine (server election, HTTP/FTP services, iperf on 5050/5051,
/// per-iteration ping pairs, page fetch, zip download); the attack side
/// drives the four flood kinds.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    int host_count = 5;           // traffic hosts; the server is elected among them
    int legit_iterations = 50;
    int ping_packets = 100;
    double ping_interval = 0.0002;  // seconds between ping packets
    int tcp_iperf_port = 5050;
    int udp_iperf_port = 5051;
    double attack_rate = 2000.0;    // flood packets/second, caps per-phase flow volume
    double attack_duration = 5.0;   // seconds per attack phase
    int attack_rounds = 2;          // phases per attack kind; 0 = legitimate-only
    double target_legit_fraction = 0.66;
    double monitor_cadence = 1.0;   // seconds between stats reports
};

inline void validate_scenario(const ScenarioConfig& config) {
    if (config.host_count < 3) {
        throw ConfigError("host_count must be >= 3 (attacker, victim, bystander), got " +
                          std::to_string(config.host_count));
    }
    if (config.legit_iterations < 1) throw ConfigError("legit_iterations must be positive");
    if (config.ping_packets < 1) throw ConfigError("ping_packets must be positive");
    if (config.ping_interval <= 0) throw ConfigError("ping_interval must be positive");
    if (!(config.target_legit_fraction > 0.0 && config.target_legit_fraction < 1.0)) {
        throw ConfigError("target_legit_fraction must lie in (0,1)");
    }
    if (config.attack_rate <= 0) throw ConfigError("attack_rate must be positive");
    if (config.attack_duration <= 0) throw ConfigError("attack_duration must be positive");
    if (config.attack_rounds < 0) throw ConfigError("attack_rounds must be >= 0");
    if (config.monitor_cadence <= 0) throw ConfigError("monitor_cadence must be positive");
}

inline std::uint32_t host_ip(int host_index) {
    return encode_ipv4("10.0.0." + std::to_string(host_index + 1));
}

inline bool in_topology_subnet(std::uint32_t ip) { return (ip & 0xffffff00u) == 0x0a000000u; }

/// Hosts are split across two edge switches.
inline std::uint32_t host_datapath(int host_index, int host_count) {
    return host_index < (host_count + 1) / 2 ? 1u : 2u;
}

namespace sim {

constexpr double kReplyOffset = 0.05;      // stats reply lands after the request
constexpr double kReportJitterMax = 0.03;  // per-record reply spread
constexpr double kIdleTimeoutSec = 20.0;   // table eviction after idle
constexpr double kSuppression = 0.95;      // legit report loss inside attack windows

// One logical flow plus its reporting plan. Records are the monitor's
// periodic counter snapshots, not individual packets.
struct FlowSession {
    FlowKey key;
    std::uint32_t datapath = 1;
    double t0 = 0.0;                // creation time, seconds
    double activity_duration = 0.0; // time over which counters ramp up
    double report_life = 0.0;       // how long the table entry keeps reporting
    std::int64_t total_packets = 0;
    double bytes_per_packet = 64.0;
    std::uint16_t flags = 0;
    bool fin_on_last = false;
    std::int32_t icmp_type = -1;
    std::int32_t icmp_code = -1;
    std::int32_t label = 0;
    // saturated flows report only at these offsets from the first pass
    // instead of every pass in the report life
    std::vector<long> sparse_passes;
};

inline void emit_session(const FlowSession& s, const ScenarioConfig& config, Rng& rng,
                         std::vector<FlowRecord>& out) {
    const double cadence = config.monitor_cadence;
    const std::uint64_t id = flow_id_of(s.key);
    const long first_pass = long(std::floor(s.t0 / cadence)) + 1;
    const long last_pass = long(std::floor((s.t0 + s.report_life) / cadence)) + 1;
    std::vector<long> passes;
    if (s.sparse_passes.empty()) {
        for (long pass = first_pass; pass <= last_pass; ++pass) passes.push_back(pass);
    } else {
        for (long offset : s.sparse_passes) passes.push_back(first_pass + offset);
    }
    for (long pass : passes) {
        const double report_time = double(pass) * cadence + kReplyOffset +
                                   rng.uniform(0.0, kReportJitterMax);
        const double age = report_time - s.t0;
        double fraction = s.activity_duration > 0.0 ? age / s.activity_duration : 1.0;
        if (fraction > 1.0) fraction = 1.0;
        std::int64_t packets = std::int64_t(std::llround(double(s.total_packets) * fraction));
        if (packets < 1) packets = 1;
        if (packets > s.total_packets) packets = s.total_packets;

        FlowRecord rec;
        rec.timestamp = std::int64_t(std::llround(report_time * 1e9));
        rec.datapath_id = s.datapath;
        rec.key = s.key;
        rec.flow_id = id;
        rec.icmp_type = s.icmp_type;
        rec.icmp_code = s.icmp_code;
        rec.flow_duration_sec = std::int64_t(age);
        rec.flow_duration_nsec = std::int64_t(std::llround((age - double(rec.flow_duration_sec)) * 1e9));
        if (rec.flow_duration_nsec >= 1000000000LL) {
            rec.flow_duration_sec += 1;
            rec.flow_duration_nsec -= 1000000000LL;
        }
        rec.flags = s.flags;
        if (s.fin_on_last && pass == last_pass) rec.flags |= kFlagFin;
        rec.packet_count = packets;
        rec.byte_count = std::max<std::int64_t>(
            packets, std::int64_t(std::llround(double(packets) * s.bytes_per_packet)));
        rec.label = s.label;
        out.push_back(rec);
    }
}

inline std::uint16_t ephemeral_port(Rng& rng) { return std::uint16_t(rng.range(49152, 65535)); }

inline std::uint32_t spoofed_ip(Rng& rng) {
    // 1.0.0.0 - 223.255.255.255 excluding the topology's own /24
    while (true) {
        const auto ip = std::uint32_t(rng.range(0x01000000LL, 0xdfffffffLL));
        if (!in_topology_subnet(ip)) return ip;
    }
}

}  // namespace sim

/// Runs the legitimate traffic script on a simulated clock. All records
/// carry label 0. Identical (config, seed) gives byte-identical output.
inline std::vector<FlowRecord> run_legitimate(const ScenarioConfig& config) {
    validate_scenario(config);
    Rng rng(mix_seed(config.seed, 0x1e617ULL));
    std::vector<FlowRecord> out;

    const int n = config.host_count;
    const int server = int(rng.below(std::uint64_t(n)));
    double t = 0.5;  // services come up, first iteration starts shortly after

    for (int iter = 0; iter < config.legit_iterations; ++iter) {
        // hosts A and B for this iteration, both distinct from the server
        int a = int(rng.below(std::uint64_t(n)));
        while (a == server) a = int(rng.below(std::uint64_t(n)));
        int b = int(rng.below(std::uint64_t(n)));
        while (b == a || b == server) b = int(rng.below(std::uint64_t(n)));

        using sim::FlowSession;
        const double ping_duration = double(config.ping_packets) * config.ping_interval;

        // a) 100-packet ICMP exchange between A and B
        FlowSession ping_fwd;
        ping_fwd.key = FlowKey{host_ip(a), 0, host_ip(b), 0, kProtoIcmp};
        ping_fwd.datapath = host_datapath(a, n);
        ping_fwd.t0 = t;
        ping_fwd.activity_duration = ping_duration;
        ping_fwd.report_life = ping_duration + sim::kIdleTimeoutSec;
        ping_fwd.total_packets = config.ping_packets;
        ping_fwd.bytes_per_packet = rng.uniform(70, 120);
        ping_fwd.icmp_type = 8;
        ping_fwd.icmp_code = 0;
        sim::emit_session(ping_fwd, config, rng, out);

        FlowSession ping_rev = ping_fwd;
        ping_rev.key = ping_fwd.key.reversed();
        ping_rev.datapath = host_datapath(b, n);
        ping_rev.icmp_type = 0;
        ping_rev.bytes_per_packet = rng.uniform(70, 120);
        sim::emit_session(ping_rev, config, rng, out);

        // c) iperf TCP and UDP toward the server, run side by side
        const double iperf_start = t + ping_duration + 0.05;
        const double tcp_dur = rng.uniform(3.0, 8.0);
        const double udp_dur = rng.uniform(3.0, 8.0);

        FlowSession tcp_fwd;
        tcp_fwd.key = FlowKey{host_ip(a), sim::ephemeral_port(rng), host_ip(server),
                              std::uint16_t(config.tcp_iperf_port), kProtoTcp};
        tcp_fwd.datapath = host_datapath(a, n);
        tcp_fwd.t0 = iperf_start;
        tcp_fwd.activity_duration = tcp_dur;
        tcp_fwd.report_life = tcp_dur + rng.uniform(0.5, 3.0);  // FIN removes the entry
        tcp_fwd.total_packets = std::int64_t(tcp_dur * rng.uniform(80, 300));
        tcp_fwd.bytes_per_packet = rng.uniform(900, 1460);
        tcp_fwd.flags = kFlagSyn | kFlagAck | kFlagPsh;
        tcp_fwd.fin_on_last = true;
        sim::emit_session(tcp_fwd, config, rng, out);

        FlowSession tcp_rev = tcp_fwd;  // pure-ACK return stream
        tcp_rev.key = tcp_fwd.key.reversed();
        tcp_rev.datapath = host_datapath(server, n);
        tcp_rev.total_packets = std::max<std::int64_t>(8, std::int64_t(double(tcp_fwd.total_packets) *
                                                                       rng.uniform(0.35, 0.55)));
        tcp_rev.bytes_per_packet = rng.uniform(40, 60);
        sim::emit_session(tcp_rev, config, rng, out);

        FlowSession udp_fwd;  // one-directional datagram stream
        udp_fwd.key = FlowKey{host_ip(a), sim::ephemeral_port(rng), host_ip(server),
                              std::uint16_t(config.udp_iperf_port), kProtoUdp};
        udp_fwd.datapath = host_datapath(a, n);
        udp_fwd.t0 = iperf_start + 0.05;
        udp_fwd.activity_duration = udp_dur;
        udp_fwd.report_life = udp_dur + sim::kIdleTimeoutSec;
        udp_fwd.total_packets = std::int64_t(udp_dur * rng.uniform(150, 400));
        udp_fwd.bytes_per_packet = rng.uniform(1000, 1470);
        sim::emit_session(udp_fwd, config, rng, out);

        // d) web page fetch from the server
        const double http_start = iperf_start + std::max(tcp_dur, udp_dur) + 0.05;
        const double http_dur = rng.uniform(0.1, 0.4);
        FlowSession http_fwd;
        http_fwd.key = FlowKey{host_ip(a), sim::ephemeral_port(rng), host_ip(server), 80, kProtoTcp};
        http_fwd.datapath = host_datapath(a, n);
        http_fwd.t0 = http_start;
        http_fwd.activity_duration = http_dur;
        http_fwd.report_life = http_dur + rng.uniform(0.5, 3.0);
        http_fwd.total_packets = rng.range(8, 25);
        http_fwd.bytes_per_packet = rng.uniform(200, 800);
        http_fwd.flags = kFlagSyn | kFlagAck | kFlagPsh;
        http_fwd.fin_on_last = true;
        sim::emit_session(http_fwd, config, rng, out);

        FlowSession http_rev = http_fwd;
        http_rev.key = http_fwd.key.reversed();
        http_rev.datapath = host_datapath(server, n);
        http_rev.total_packets = std::int64_t(double(http_fwd.total_packets) * rng.uniform(1.2, 2.0));
        http_rev.bytes_per_packet = rng.uniform(600, 1400);
        sim::emit_session(http_rev, config, rng, out);

        // e) zip download over the FTP service
        const double zip_start = http_start + http_dur + 0.05;
        const double zip_dur = rng.uniform(1.0, 3.0);
        FlowSession zip_fwd;
        zip_fwd.key = FlowKey{host_ip(server), 21, host_ip(a), sim::ephemeral_port(rng), kProtoTcp};
        zip_fwd.datapath = host_datapath(server, n);
        zip_fwd.t0 = zip_start;
        zip_fwd.activity_duration = zip_dur;
        zip_fwd.report_life = zip_dur + rng.uniform(0.5, 3.0);
        zip_fwd.total_packets = rng.range(60, 200);
        zip_fwd.bytes_per_packet = rng.uniform(1100, 1460);
        zip_fwd.flags = kFlagSyn | kFlagAck | kFlagPsh;
        zip_fwd.fin_on_last = true;
        sim::emit_session(zip_fwd, config, rng, out);

        FlowSession zip_rev = zip_fwd;  // client-side ACK stream
        zip_rev.key = zip_fwd.key.reversed();
        zip_rev.datapath = host_datapath(a, n);
        zip_rev.total_packets = std::max<std::int64_t>(8, std::int64_t(double(zip_fwd.total_packets) *
                                                                       rng.uniform(0.3, 0.5)));
        zip_rev.bytes_per_packet = rng.uniform(40, 60);
        sim::emit_session(zip_rev, config, rng, out);

        t = zip_start + zip_dur + rng.uniform(0.2, 0.6);
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const FlowRecord& a2, const FlowRecord& b2) { return a2.timestamp < b2.timestamp; });
    return out;
}

/// Emits flood records for every schedule entry. All records carry label 1.
inline std::vector<FlowRecord> run_attack(const ScenarioConfig& config, const AttackSchedule& schedule) {
    validate_scenario(config);
    validate_schedule(schedule);
    std::vector<FlowRecord> out;
    const int n = config.host_count;

    for (std::size_t entry_index = 0; entry_index < schedule.entries.size(); ++entry_index) {
        const AttackEntry& entry = schedule.entries[entry_index];
        if (entry.attacker_host < 0 || entry.attacker_host >= n || entry.victim_host < 0 ||
            entry.victim_host >= n) {
            throw ConfigError("attack entry references a host outside the topology");
        }
        Rng rng(mix_seed(config.seed ^ 0xa77ac4ULL, entry_index));
        const double duration = entry.end - entry.start;
        const std::uint32_t victim = host_ip(entry.victim_host);
        const std::uint32_t attacker_dp = host_datapath(entry.attacker_host, n);

        if (entry.kind == AttackKind::LandFlood) {
            // every flood packet shares the victim's own 5-tuple, so the
            // switch aggregates the whole phase into one growing flow
            sim::FlowSession s;
            s.key = FlowKey{victim, 0, victim, 0, kProtoTcp};
            s.datapath = attacker_dp;
            s.t0 = entry.start;
            s.activity_duration = duration;
            s.report_life = duration;
            s.total_packets = std::int64_t(config.attack_rate * duration);
            s.bytes_per_packet = rng.uniform(40, 56);
            s.flags = kFlagSyn;
            s.label = 1;
            sim::emit_session(s, config, rng, out);
            continue;
        }

        std::size_t flows = entry.flow_count;
        if (flows == 0) {
            flows = std::size_t(std::max(1.0, config.attack_rate * duration / 1.5));
        }
        for (std::size_t i = 0; i < flows; ++i) {
            const double created =
                entry.start + duration * (double(i) + rng.uniform(0.0, 0.9)) / double(flows);
            sim::FlowSession s;
            s.datapath = attacker_dp;
            s.t0 = created;
            s.activity_duration = 0.0;  // burst; counters appear fully formed
            s.report_life = 0.0;        // first report only; extras added below
            s.total_packets = rng.chance(0.6) ? 1 : rng.range(2, 3);
            s.bytes_per_packet = rng.uniform(40, 56);
            s.label = 1;
            switch (entry.kind) {
                case AttackKind::IcmpFlood:
                    s.key = FlowKey{sim::spoofed_ip(rng), 0, victim, 0, kProtoIcmp};
                    s.icmp_type = 8;
                    s.icmp_code = 0;
                    break;
                case AttackKind::UdpFlood:
                    s.key = FlowKey{sim::spoofed_ip(rng), std::uint16_t(rng.range(1024, 65535)), victim,
                                    0, kProtoUdp};
                    break;
                case AttackKind::TcpSynFlood: {
                    std::uint16_t port = 80;
                    if (rng.chance(0.1)) {  // sweep tail over the remaining ports
                        port = std::uint16_t(rng.range(1, 65535));
                        if (port == 80) port = 81;
                    }
                    s.key = FlowKey{sim::spoofed_ip(rng), std::uint16_t(rng.range(1024, 65535)), victim,
                                    port, kProtoTcp};
                    s.flags = kFlagSyn;
                    break;
                }
                case AttackKind::LandFlood:
                    break;  // handled above
            }
            // saturation: the first report lags, and the occasional
            // follow-up skips several whole passes (sparse high gaps)
            if (rng.chance(0.25)) s.t0 += config.monitor_cadence * rng.uniform(0.5, 1.5);
            s.sparse_passes = {0};
            if (rng.chance(0.12)) {
                long skip = rng.chance(0.3) ? 1 : long(rng.range(2, 8));
                s.sparse_passes.push_back(skip);
                if (rng.chance(0.3)) s.sparse_passes.push_back(skip + long(rng.range(1, 4)));
            }
            while (s.t0 + double(s.sparse_passes.back() + 1) * config.monitor_cadence >
                       entry.end + sim::kIdleTimeoutSec &&
                   s.sparse_passes.size() > 1) {
                s.sparse_passes.pop_back();
            }
            sim::emit_session(s, config, rng, out);
        }
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const FlowRecord& a, const FlowRecord& b) { return a.timestamp < b.timestamp; });
    return out;
}

/// Kind-specific 5-tuple signature check, ignoring the time window.
inline bool matches_attack_tuple(const FlowRecord& rec, const AttackEntry& entry) {
    const std::uint32_t victim = host_ip(entry.victim_host);
    switch (entry.kind) {
        case AttackKind::IcmpFlood:
            return rec.key.ip_proto == kProtoIcmp && rec.key.ip_dst == victim &&
                   !in_topology_subnet(rec.key.ip_src);
        case AttackKind::UdpFlood:
            return rec.key.ip_proto == kProtoUdp && rec.key.ip_dst == victim && rec.key.tp_dst == 0 &&
                   !in_topology_subnet(rec.key.ip_src);
        case AttackKind::TcpSynFlood:
            return rec.key.ip_proto == kProtoTcp && rec.key.ip_dst == victim &&
                   !in_topology_subnet(rec.key.ip_src);
        case AttackKind::LandFlood:
            return rec.key.ip_proto == kProtoTcp && rec.key.ip_src == rec.key.ip_dst &&
                   rec.key.ip_dst == victim && rec.key.tp_src == rec.key.tp_dst;
    }
    return false;
}

/// True when a record falls inside the entry's window and matches its
/// kind-specific 5-tuple signature.
inline bool matches_attack_signature(const FlowRecord& rec, const AttackEntry& entry) {
    const double t = double(rec.timestamp) * 1e-9;
    if (t < entry.start || t > entry.end) return false;
    return matches_attack_tuple(rec, entry);
}

/// Relabels rows from the schedule: label 1 iff some entry's window covers
/// the row and its 5-tuple matches that entry's signature.
inline std::vector<FlowRecord> label_flows(std::vector<FlowRecord> rows, const AttackSchedule& schedule) {
    validate_schedule(schedule);
    for (FlowRecord& rec : rows) {
        rec.label = 0;
        for (const AttackEntry& entry : schedule.entries) {
            if (matches_attack_signature(rec, entry)) {
                rec.label = 1;
                break;
            }
        }
    }
    return rows;
}

struct GeneratedDataset {
    std::vector<FlowRecord> rows;
    AttackSchedule schedule;
};

namespace sim {

// fraction of the dataset reserved for training; attack sessions are laid
// out so none straddles the row at this quantile
constexpr double kDefaultTrainFraction = 0.70;

// Planned per-kind row volume for one round.
struct RoundPlan {
    double r_rows = 0.0;   // icmp and udp rows each
    double sigma = 1.0;    // syn multiplier keeping the port-0/80 ratio at 1.5
    double land_rows = 0.0;
};

inline RoundPlan plan_round(const ScenarioConfig& config, double kept_legit_estimate) {
    RoundPlan plan;
    const double f = config.target_legit_fraction;
    const double budget = kept_legit_estimate * (1.0 - f) / f;
    plan.land_rows = std::floor(config.attack_duration / config.monitor_cadence) + 1.0;
    const double per_round = budget / double(config.attack_rounds);
    plan.r_rows = (per_round - 1.7407 * plan.land_rows) / 3.4815;
    if (plan.r_rows < 4.0) {
        throw ConfigError("target_legit_fraction leaves no room for attack traffic; raise "
                          "legit_iterations or move the fraction");
    }
    plan.sigma = (2.0 * plan.r_rows + plan.land_rows) / (1.35 * plan.r_rows);
    return plan;
}

inline double kind_rows(const RoundPlan& plan, AttackKind kind) {
    switch (kind) {
        case AttackKind::IcmpFlood:
        case AttackKind::UdpFlood: return plan.r_rows;
        case AttackKind::TcpSynFlood: return plan.sigma * plan.r_rows;
        case AttackKind::LandFlood: return plan.land_rows;
    }
    return 0.0;
}

// Rounds are placed entirely before or after the train boundary, with
// their volumes scaled so the attack mass splits 70/30; both partitions
// then hold every attack kind at the global class mix. A single round
// cannot be split this way and keeps scale 1.
inline int rounds_before_boundary(int rounds) {
    if (rounds < 2) return rounds;
    int k = int(std::lround(kDefaultTrainFraction * double(rounds)));
    if (k < 1) k = 1;
    if (k > rounds - 1) k = rounds - 1;
    return k;
}

inline double round_scale(int round_index, int rounds) {
    if (rounds < 2) return 1.0;
    const int k = rounds_before_boundary(rounds);
    if (round_index < k) return kDefaultTrainFraction * double(rounds) / double(k);
    return (1.0 - kDefaultTrainFraction) * double(rounds) / double(rounds - k);
}

/// Phase centers chosen in row space: attack mass splits roughly 70/30
/// around the train boundary and a legit-only guard band keeps every
/// session clear of it.
inline std::vector<double> plan_phase_centers(const ScenarioConfig& config,
                                              const std::vector<FlowRecord>& legit, double guard) {
    const double t_end = double(legit.back().timestamp) * 1e-9;
    const int phases = 4 * config.attack_rounds;
    const double legit_rate = double(legit.size()) / t_end;
    const double kept_estimate =
        double(legit.size()) -
        double(phases) * kSuppression * config.attack_duration * legit_rate;
    const RoundPlan plan = plan_round(config, kept_estimate);

    const int before = 4 * rounds_before_boundary(config.attack_rounds);

    // legit-row quantiles -> times, with removed reports accounted for as
    // windows are placed left to right
    std::vector<double> centers;
    double removed = 0.0;
    const double removal_per_phase = kSuppression * config.attack_duration * legit_rate;
    const double before_span = kDefaultTrainFraction - guard;
    const double after_start = kDefaultTrainFraction + guard;
    for (int p = 0; p < phases; ++p) {
        double kept_quantile;
        if (config.attack_rounds < 2) {
            // single round: no boundary to respect, spread evenly
            kept_quantile = (double(p) + 0.5) / double(phases);
        } else if (p < before) {
            kept_quantile = before_span * (double(p) + 0.5) / double(before);
        } else {
            kept_quantile = after_start +
                            (1.0 - after_start) * (double(p - before) + 0.5) / double(phases - before);
        }
        const double kept_target = kept_quantile * kept_estimate;
        auto index = std::size_t(kept_target + removed);
        if (index >= legit.size()) index = legit.size() - 1;
        centers.push_back(double(legit[index].timestamp) * 1e-9);
        removed += removal_per_phase;
    }

    for (std::size_t p = 0; p + 1 < centers.size(); ++p) {
        if (centers[p + 1] - centers[p] < config.attack_duration * 1.2) {
            throw ConfigError("attack phases do not fit the legitimate timeline; lower attack_rounds, "
                              "shorten attack_duration, or raise legit_iterations");
        }
    }
    if (centers.front() < config.attack_duration ||
        centers.back() > t_end - config.attack_duration * 0.6) {
        throw ConfigError("attack phases do not fit the legitimate timeline; lower attack_rounds, "
                          "shorten attack_duration, or raise legit_iterations");
    }
    return centers;
}

inline GeneratedDataset generate_attempt(const ScenarioConfig& config,
                                         const std::vector<FlowRecord>& legit,
                                         const std::vector<double>& centers, std::uint64_t attempt) {
    GeneratedDataset result;
    const AttackKind kinds[] = {AttackKind::IcmpFlood, AttackKind::UdpFlood, AttackKind::TcpSynFlood,
                                AttackKind::LandFlood};
    const int phases = 4 * config.attack_rounds;

    // kinds interleaved, hosts drawn per phase
    Rng sched_rng(mix_seed(config.seed, 0x5c4edULL));
    const int n = config.host_count;
    for (int p = 0; p < phases; ++p) {
        AttackEntry entry;
        entry.kind = kinds[p % 4];
        entry.attacker_host = int(sched_rng.below(std::uint64_t(n)));
        entry.victim_host = int(sched_rng.below(std::uint64_t(n)));
        while (entry.victim_host == entry.attacker_host) {
            entry.victim_host = int(sched_rng.below(std::uint64_t(n)));
        }
        entry.start = centers[std::size_t(p)] - config.attack_duration / 2.0;
        entry.end = centers[std::size_t(p)] + config.attack_duration / 2.0;
        entry.spoofed = entry.kind != AttackKind::LandFlood;
        result.schedule.entries.push_back(entry);
    }

    // controller saturation drops most legitimate reports inside the windows
    Rng supp_rng(mix_seed(config.seed, 0xd20bULL + attempt));
    std::vector<FlowRecord> kept;
    kept.reserve(legit.size());
    for (const FlowRecord& rec : legit) {
        const double t = double(rec.timestamp) * 1e-9;
        bool inside = false;
        for (const AttackEntry& entry : result.schedule.entries) {
            if (t >= entry.start && t <= entry.end) {
                inside = true;
                break;
            }
        }
        if (inside && supp_rng.chance(kSuppression)) continue;
        kept.push_back(rec);
    }

    // attack row budget from the realized legitimate volume; icmp and udp
    // rows R each per round, syn rows sigma*R, land a single growing flow
    const RoundPlan plan = plan_round(config, double(kept.size()));
    const double mean_records_per_flow = 1.0 + 0.12 * 1.3;
    const double cap = config.attack_rate * config.attack_duration;
    for (std::size_t i = 0; i < result.schedule.entries.size(); ++i) {
        AttackEntry& entry = result.schedule.entries[i];
        if (entry.kind == AttackKind::LandFlood) continue;  // single aggregated flow
        const double scale = round_scale(int(i) / 4, config.attack_rounds);
        const double flows = std::ceil(scale * kind_rows(plan, entry.kind) / mean_records_per_flow);
        if (flows > cap) {
            throw ConfigError("attack phase needs " + std::to_string(std::size_t(flows)) +
                              " flows but attack_rate*attack_duration caps it at " +
                              std::to_string(std::size_t(cap)) +
                              "; raise attack_rate or attack_duration");
        }
        entry.flow_count = std::size_t(flows);
    }

    std::vector<FlowRecord> attack = run_attack(config, result.schedule);

    // stragglers report after the nominal window; stretch each entry so
    // labeling still covers its own flows
    for (AttackEntry& entry : result.schedule.entries) {
        double latest = entry.end;
        for (const FlowRecord& rec : attack) {
            const double t = double(rec.timestamp) * 1e-9;
            if (t > latest && t >= entry.start && t - entry.end < 40.0 &&
                matches_attack_tuple(rec, entry)) {
                latest = t;
            }
        }
        entry.end = latest + 0.001;
    }

    result.rows = kept;
    result.rows.insert(result.rows.end(), attack.begin(), attack.end());
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const FlowRecord& a, const FlowRecord& b) { return a.timestamp < b.timestamp; });
    result.rows = label_flows(std::move(result.rows), result.schedule);
    return result;
}

// true when some session has labeled rows on both sides of the boundary
inline bool sessions_straddle(const GeneratedDataset& data, std::size_t boundary) {
    for (const AttackEntry& entry : data.schedule.entries) {
        bool before = false, after = false;
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            if (data.rows[i].label == 1 && matches_attack_signature(data.rows[i], entry)) {
                (i < boundary ? before : after) = true;
                if (before && after) return true;
            }
        }
    }
    return false;
}

}  // namespace sim

/// Full scenario: legitimate script plus interleaved attack phases on a
/// shared clock. Attack volume is sized from the realized legitimate row
/// count so the label mix lands on target_legit_fraction; phase volume is
/// capped by attack_rate * attack_duration. Phase placement retries with
/// shifted centers until no session straddles the default 70% train
/// boundary, keeping the generated data splittable.
inline GeneratedDataset generate_dataset(const ScenarioConfig& config) {
    validate_scenario(config);

    std::vector<FlowRecord> legit = run_legitimate(config);
    if (config.attack_rounds == 0) {
        GeneratedDataset result;
        result.rows = std::move(legit);
        return result;
    }

    const double guards[] = {0.04, 0.06, 0.09, 0.13};
    GeneratedDataset data;
    bool placed = false;
    for (std::size_t attempt = 0; attempt < std::size(guards); ++attempt) {
        const std::vector<double> centers = sim::plan_phase_centers(config, legit, guards[attempt]);
        data = sim::generate_attempt(config, legit, centers, attempt);
        if (config.attack_rounds < 2) {
            placed = true;  // single-round scenarios are not meant to be split
            break;
        }
        const auto boundary =
            std::size_t(std::floor(sim::kDefaultTrainFraction * double(data.rows.size())));
        if (!sim::sessions_straddle(data, boundary)) {
            placed = true;
            break;
        }
    }
    if (!placed) {
        throw ConfigError("could not place attack phases clear of the train/test boundary; "
                          "adjust attack_duration or legit_iterations");
    }

    std::size_t legit_count = 0;
    for (const FlowRecord& rec : data.rows) legit_count += rec.label == 0 ? 1 : 0;
    const double fraction = double(legit_count) / double(data.rows.size());
    if (std::abs(fraction - config.target_legit_fraction) > 0.05) {
        throw ConfigError("generated legitimate fraction " + std::to_string(fraction) +
                          " missed the target " + std::to_string(config.target_legit_fraction) +
                          "; adjust attack_duration/attack_rounds");
    }
    return data;
}

/// Sidecar audit export: kind, attacker, victim, start, end.
inline void write_schedule_csv(const AttackSchedule& schedule, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "kind,attacker,victim,start,end\n";
    for (const AttackEntry& e : schedule.entries) {
        out << attack_kind_name(e.kind) << ',' << ipv4_to_string(host_ip(e.attacker_host)) << ','
            << ipv4_to_string(host_ip(e.victim_host)) << ',' << e.start << ',' << e.end << '\n';
    }
}

}  // namespace mldas
