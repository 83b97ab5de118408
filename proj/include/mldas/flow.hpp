#pragma once

#include <cstdint>
#include <string>

#include "mldas/errors.hpp"

namespace mldas {

constexpr std::uint8_t kProtoIcmp = 1;
constexpr std::uint8_t kProtoTcp = 6;
constexpr std::uint8_t kProtoUdp = 17;

// TCP flag bits as recorded in the flags bitmask.
constexpr std::uint16_t kFlagFin = 0x01;
constexpr std::uint16_t kFlagSyn = 0x02;
constexpr std::uint16_t kFlagPsh = 0x08;
constexpr std::uint16_t kFlagAck = 0x10;

/// Parses a dotted-quad IPv4 address into its 32-bit big-endian value.
/// Throws ValidationError naming the offending octet on malformed input.
inline std::uint32_t encode_ipv4(const std::string& addr) {
    std::uint32_t value = 0;
    int octet_index = 0;
    std::size_t pos = 0;
    while (octet_index < 4) {
        std::size_t start = pos;
        std::uint32_t octet = 0;
        int digits = 0;
        while (pos < addr.size() && addr[pos] >= '0' && addr[pos] <= '9') {
            octet = octet * 10 + static_cast<std::uint32_t>(addr[pos] - '0');
            ++digits;
            ++pos;
            if (digits > 3) break;
        }
        if (digits == 0 || digits > 3 || octet > 255) {
            throw ValidationError("encode_ipv4: bad octet " + std::to_string(octet_index + 1) +
                                  " in \"" + addr + "\" at position " + std::to_string(start));
        }
        value = (value << 8) | octet;
        ++octet_index;
        if (octet_index < 4) {
            if (pos >= addr.size() || addr[pos] != '.') {
                throw ValidationError("encode_ipv4: expected '.' after octet " +
                                      std::to_string(octet_index) + " in \"" + addr + "\"");
            }
            ++pos;
        }
    }
    if (pos != addr.size()) {
        throw ValidationError("encode_ipv4: trailing characters after octet 4 in \"" + addr + "\"");
    }
    return value;
}

inline std::string ipv4_to_string(std::uint32_t ip) {
    return std::to_string((ip >> 24) & 0xff) + "." + std::to_string((ip >> 16) & 0xff) + "." +
           std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff);
}

/// Unidirectional flow identity: 5-tuple with integer-encoded IPs.
/// ICMP flows carry tp_src = tp_dst = 0.
struct FlowKey {
    std::uint32_t ip_src = 0;
    std::uint16_t tp_src = 0;
    std::uint32_t ip_dst = 0;
    std::uint16_t tp_dst = 0;
    std::uint8_t ip_proto = 0;

    bool operator==(const FlowKey&) const = default;

    FlowKey reversed() const { return FlowKey{ip_dst, tp_dst, ip_src, tp_src, ip_proto}; }
};

inline void validate_key(const FlowKey& key) {
    if (key.ip_proto != kProtoIcmp && key.ip_proto != kProtoTcp && key.ip_proto != kProtoUdp) {
        throw ValidationError("FlowKey: ip_proto must be 1, 6 or 17, got " +
                              std::to_string(int(key.ip_proto)));
    }
    if (key.ip_proto == kProtoIcmp && (key.tp_src != 0 || key.tp_dst != 0)) {
        throw ValidationError("FlowKey: ICMP flows must have tp_src = tp_dst = 0");
    }
}

/// Stable 64-bit id of the canonical "ip_src|tp_src|ip_dst|tp_dst|ip_proto"
/// string (dotted-quad IPs, decimal ports/protocol), hashed with FNV-1a.
/// The same key gives the same id on every platform and run.
inline std::uint64_t flow_id_of(const FlowKey& key) {
    const std::string canon = ipv4_to_string(key.ip_src) + "|" + std::to_string(key.tp_src) + "|" +
                              ipv4_to_string(key.ip_dst) + "|" + std::to_string(key.tp_dst) + "|" +
                              std::to_string(int(key.ip_proto));
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// One monitor snapshot of a flow's statistics, in dataset row order.
struct FlowRecord {
    std::int64_t timestamp = 0;  // ns since scenario start
    std::uint32_t datapath_id = 0;
    FlowKey key;
    std::uint64_t flow_id = 0;
    std::int32_t icmp_code = -1;  // -1 when not ICMP
    std::int32_t icmp_type = -1;
    std::int64_t flow_duration_sec = 0;
    std::int64_t flow_duration_nsec = 0;  // sub-second remainder, < 1e9
    std::int32_t idle_timeout = 20;
    std::int32_t hard_timeout = 100;
    std::uint16_t flags = 0;
    std::int64_t packet_count = 0;
    std::int64_t byte_count = 0;
    std::int32_t label = 0;

    bool operator==(const FlowRecord&) const = default;

    double duration_seconds() const {
        return double(flow_duration_sec) + double(flow_duration_nsec) * 1e-9;
    }
};

inline void validate_record(const FlowRecord& rec, std::size_t row_index) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("row " + std::to_string(row_index) + ": " + what);
    };
    try {
        validate_key(rec.key);
    } catch (const ValidationError& e) {
        fail(e.what());
    }
    if (rec.label != 0 && rec.label != 1) fail("label must be 0 or 1, got " + std::to_string(rec.label));
    if (rec.packet_count < 0) fail("packet_count negative");
    if (rec.byte_count < 0) fail("byte_count negative");
    if (rec.packet_count > 0 && rec.byte_count < rec.packet_count) {
        fail("byte_count < packet_count");
    }
    if (rec.flow_duration_sec < 0 || rec.flow_duration_nsec < 0) fail("negative flow duration");
    if (rec.flow_duration_nsec >= 1000000000LL) fail("flow_duration_nsec >= 1e9");
    if (rec.key.ip_proto == kProtoIcmp) {
        if (rec.icmp_type != 0 && rec.icmp_type != 8) fail("ICMP record with icmp_type not in {0,8}");
    } else if (rec.icmp_code != -1 || rec.icmp_type != -1) {
        fail("non-ICMP record must carry icmp_code = icmp_type = -1");
    }
}

/// The 15-column cleaned dataset row (flags/idle_timeout/hard_timeout
/// dropped, IPs integer-encoded, inner_time_flow appended).
struct PreparedRow {
    std::int64_t datapath_id = 0;
    std::uint64_t flow_id = 0;
    std::uint32_t ip_src = 0;
    std::int32_t tp_src = 0;
    std::uint32_t ip_dst = 0;
    std::int32_t tp_dst = 0;
    std::int32_t ip_proto = 0;
    std::int32_t icmp_code = -1;
    std::int32_t icmp_type = -1;
    std::int64_t flow_duration_sec = 0;
    std::int64_t flow_duration_nsec = 0;
    std::int64_t packet_count = 0;
    std::int64_t byte_count = 0;
    std::int32_t label = 0;
    double inner_time_flow = 0.0;  // seconds since the previous record of the same flow

    bool operator==(const PreparedRow&) const = default;
};

inline void validate_prepared(const PreparedRow& row, std::size_t row_index) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("row " + std::to_string(row_index) + ": " + what);
    };
    if (row.label != 0 && row.label != 1) fail("label must be 0 or 1, got " + std::to_string(row.label));
    if (row.inner_time_flow < 0) fail("inner_time_flow negative");
    if (row.packet_count < 0 || row.byte_count < 0) fail("negative counter");
    if (row.packet_count > 0 && row.byte_count < row.packet_count) fail("byte_count < packet_count");
    if (row.flow_duration_sec < 0 || row.flow_duration_nsec < 0) fail("negative flow duration");
    if (row.flow_duration_nsec >= 1000000000LL) fail("flow_duration_nsec >= 1e9");
}

/// Packet/byte rates over the flow's duration. Zero-duration flows yield
/// zero rates so degenerate rows never produce infinities.
struct RateSet {
    double packet_count_per_sec = 0.0;
    double packet_count_per_ns = 0.0;
    double byte_count_per_sec = 0.0;
    double byte_count_per_ns = 0.0;
};

inline RateSet derive_rates(const FlowRecord& rec) {
    RateSet rates;
    if (rec.flow_duration_sec > 0) {
        rates.packet_count_per_sec = double(rec.packet_count) / double(rec.flow_duration_sec);
        rates.byte_count_per_sec = double(rec.byte_count) / double(rec.flow_duration_sec);
    }
    if (rec.flow_duration_nsec > 0) {
        rates.packet_count_per_ns = double(rec.packet_count) / double(rec.flow_duration_nsec);
        rates.byte_count_per_ns = double(rec.byte_count) / double(rec.flow_duration_nsec);
    }
    return rates;
}

}  // namespace mldas
