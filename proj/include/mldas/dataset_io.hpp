#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mldas/errors.hpp"
#include "mldas/flow.hpp"

namespace mldas {

// Both schemas are a fixed interchange contract: comma separator, '.'
// decimal point, LF line endings, UTF-8, header row mandatory.

inline const std::string kRawHeader =
    "timestamp,datapath_id,flow_id,ip_src,tp_src,ip_dst,tp_dst,ip_proto,icmp_code,icmp_type,"
    "flow_duration_sec,flow_duration_ns,idle_timeout,hard_timeout,flags,packet_count,byte_count,"
    "packet_count_per_sec,packet_count_per_ns,byte_count_per_sec,byte_count_per_ns,Label";

inline const std::string kPreparedHeader =
    "datapath_id,flow_id,ip_src,tp_src,ip_dst,tp_dst,ip_proto,icmp_code,icmp_type,"
    "flow_duration_sec,flow_duration_nsec,packet_count,byte_count,label,inner_time_flow";

/// Shortest decimal form that round-trips the exact double value.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view text, std::size_t row_index) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError("row " + std::to_string(row_index) + ": bad numeric field \"" +
                              std::string(text) + "\"");
    }
    return value;
}

template <typename Int>
inline Int parse_int(std::string_view text, std::size_t row_index) {
    Int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError("row " + std::to_string(row_index) + ": bad integer field \"" +
                              std::string(text) + "\"");
    }
    return value;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline void format_raw_row(const FlowRecord& rec, std::string& out) {
    const RateSet rates = derive_rates(rec);
    out += std::to_string(rec.timestamp);
    out += ',';
    out += std::to_string(rec.datapath_id);
    out += ',';
    out += std::to_string(rec.flow_id);
    out += ',';
    out += ipv4_to_string(rec.key.ip_src);
    out += ',';
    out += std::to_string(rec.key.tp_src);
    out += ',';
    out += ipv4_to_string(rec.key.ip_dst);
    out += ',';
    out += std::to_string(rec.key.tp_dst);
    out += ',';
    out += std::to_string(int(rec.key.ip_proto));
    out += ',';
    out += std::to_string(rec.icmp_code);
    out += ',';
    out += std::to_string(rec.icmp_type);
    out += ',';
    out += std::to_string(rec.flow_duration_sec);
    out += ',';
    out += std::to_string(rec.flow_duration_nsec);
    out += ',';
    out += std::to_string(rec.idle_timeout);
    out += ',';
    out += std::to_string(rec.hard_timeout);
    out += ',';
    out += std::to_string(rec.flags);
    out += ',';
    out += std::to_string(rec.packet_count);
    out += ',';
    out += std::to_string(rec.byte_count);
    out += ',';
    out += format_double(rates.packet_count_per_sec);
    out += ',';
    out += format_double(rates.packet_count_per_ns);
    out += ',';
    out += format_double(rates.byte_count_per_sec);
    out += ',';
    out += format_double(rates.byte_count_per_ns);
    out += ',';
    out += std::to_string(rec.label);
    out += '\n';
}

inline void format_prepared_row(const PreparedRow& row, std::string& out) {
    out += std::to_string(row.datapath_id);
    out += ',';
    out += std::to_string(row.flow_id);
    out += ',';
    out += std::to_string(row.ip_src);
    out += ',';
    out += std::to_string(row.tp_src);
    out += ',';
    out += std::to_string(row.ip_dst);
    out += ',';
    out += std::to_string(row.tp_dst);
    out += ',';
    out += std::to_string(row.ip_proto);
    out += ',';
    out += std::to_string(row.icmp_code);
    out += ',';
    out += std::to_string(row.icmp_type);
    out += ',';
    out += std::to_string(row.flow_duration_sec);
    out += ',';
    out += std::to_string(row.flow_duration_nsec);
    out += ',';
    out += std::to_string(row.packet_count);
    out += ',';
    out += std::to_string(row.byte_count);
    out += ',';
    out += std::to_string(row.label);
    out += ',';
    out += format_double(row.inner_time_flow);
    out += '\n';
}

/// Writes raw Table-style rows. Returns the number of data rows written.
inline std::size_t write_dataset(const std::vector<FlowRecord>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    std::string buf = kRawHeader;
    buf += '\n';
    for (const FlowRecord& rec : rows) format_raw_row(rec, buf);
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw IoError("short write to " + path);
    return rows.size();
}

/// Writes prepared 15-column rows. Returns the number of data rows written.
inline std::size_t write_dataset(const std::vector<PreparedRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    std::string buf = kPreparedHeader;
    buf += '\n';
    for (const PreparedRow& row : rows) format_prepared_row(row, buf);
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw IoError("short write to " + path);
    return rows.size();
}

enum class DatasetSchema { Raw, Prepared };

struct ReadResult {
    DatasetSchema schema = DatasetSchema::Raw;
    std::vector<FlowRecord> raw;
    std::vector<PreparedRow> prepared;
};

inline FlowRecord parse_raw_row(const std::vector<std::string_view>& f, std::size_t row_index) {
    if (f.size() != 22) {
        throw ValidationError("row " + std::to_string(row_index) + ": expected 22 fields, got " +
                              std::to_string(f.size()));
    }
    FlowRecord rec;
    rec.timestamp = parse_int<std::int64_t>(f[0], row_index);
    rec.datapath_id = parse_int<std::uint32_t>(f[1], row_index);
    rec.flow_id = parse_int<std::uint64_t>(f[2], row_index);
    rec.key.ip_src = encode_ipv4(std::string(f[3]));
    rec.key.tp_src = parse_int<std::uint16_t>(f[4], row_index);
    rec.key.ip_dst = encode_ipv4(std::string(f[5]));
    rec.key.tp_dst = parse_int<std::uint16_t>(f[6], row_index);
    rec.key.ip_proto = std::uint8_t(parse_int<std::uint16_t>(f[7], row_index));
    rec.icmp_code = parse_int<std::int32_t>(f[8], row_index);
    rec.icmp_type = parse_int<std::int32_t>(f[9], row_index);
    rec.flow_duration_sec = parse_int<std::int64_t>(f[10], row_index);
    rec.flow_duration_nsec = parse_int<std::int64_t>(f[11], row_index);
    rec.idle_timeout = parse_int<std::int32_t>(f[12], row_index);
    rec.hard_timeout = parse_int<std::int32_t>(f[13], row_index);
    rec.flags = parse_int<std::uint16_t>(f[14], row_index);
    rec.packet_count = parse_int<std::int64_t>(f[15], row_index);
    rec.byte_count = parse_int<std::int64_t>(f[16], row_index);
    // fields 17-20 are the derived rates; recomputed, not stored
    rec.label = parse_int<std::int32_t>(f[21], row_index);
    validate_record(rec, row_index);
    return rec;
}

inline PreparedRow parse_prepared_row(const std::vector<std::string_view>& f, std::size_t row_index) {
    if (f.size() != 15) {
        throw ValidationError("row " + std::to_string(row_index) + ": expected 15 fields, got " +
                              std::to_string(f.size()));
    }
    PreparedRow row;
    row.datapath_id = parse_int<std::int64_t>(f[0], row_index);
    row.flow_id = parse_int<std::uint64_t>(f[1], row_index);
    row.ip_src = parse_int<std::uint32_t>(f[2], row_index);
    row.tp_src = parse_int<std::int32_t>(f[3], row_index);
    row.ip_dst = parse_int<std::uint32_t>(f[4], row_index);
    row.tp_dst = parse_int<std::int32_t>(f[5], row_index);
    row.ip_proto = parse_int<std::int32_t>(f[6], row_index);
    row.icmp_code = parse_int<std::int32_t>(f[7], row_index);
    row.icmp_type = parse_int<std::int32_t>(f[8], row_index);
    row.flow_duration_sec = parse_int<std::int64_t>(f[9], row_index);
    row.flow_duration_nsec = parse_int<std::int64_t>(f[10], row_index);
    row.packet_count = parse_int<std::int64_t>(f[11], row_index);
    row.byte_count = parse_int<std::int64_t>(f[12], row_index);
    row.label = parse_int<std::int32_t>(f[13], row_index);
    row.inner_time_flow = parse_double(f[14], row_index);
    validate_prepared(row, row_index);
    return row;
}

/// Reads either schema, detected by exact header match. Every row is
/// validated against the type invariants; violations report the row index.
inline ReadResult read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file, missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    ReadResult result;
    if (line == kRawHeader) {
        result.schema = DatasetSchema::Raw;
    } else if (line == kPreparedHeader) {
        result.schema = DatasetSchema::Prepared;
    } else {
        throw SchemaError(path + ": unknown header \"" + line + "\"");
    }

    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (result.schema == DatasetSchema::Raw) {
            result.raw.push_back(parse_raw_row(fields, row_index));
        } else {
            result.prepared.push_back(parse_prepared_row(fields, row_index));
        }
        ++row_index;
    }
    return result;
}

}  // namespace mldas
