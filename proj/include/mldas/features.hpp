#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mldas/errors.hpp"
#include "mldas/flow.hpp"
#include "mldas/matrix.hpp"
#include "mldas/rng.hpp"
#include "mldas/traffic.hpp"

namespace mldas {

/// Drops the protocol-constant columns (flags, idle_timeout, hard_timeout),
/// integer-encodes addresses and appends inner_time_flow: seconds since the
/// previous record of the same flow, 0 for a flow's first record.
inline std::vector<PreparedRow> prepare(std::span<const FlowRecord> rows) {
    std::int64_t prev_ts = std::numeric_limits<std::int64_t>::min();
    for (const FlowRecord& rec : rows) {
        if (rec.timestamp < prev_ts) throw ValidationError("prepare: rows are not timestamp-sorted");
        prev_ts = rec.timestamp;
    }
    std::vector<PreparedRow> out;
    out.reserve(rows.size());
    std::unordered_map<std::uint64_t, std::int64_t> last_seen;
    for (const FlowRecord& rec : rows) {
        PreparedRow row;
        row.datapath_id = rec.datapath_id;
        row.flow_id = rec.flow_id;
        row.ip_src = rec.key.ip_src;
        row.tp_src = rec.key.tp_src;
        row.ip_dst = rec.key.ip_dst;
        row.tp_dst = rec.key.tp_dst;
        row.ip_proto = rec.key.ip_proto;
        row.icmp_code = rec.icmp_code;
        row.icmp_type = rec.icmp_type;
        row.flow_duration_sec = rec.flow_duration_sec;
        row.flow_duration_nsec = rec.flow_duration_nsec;
        row.packet_count = rec.packet_count;
        row.byte_count = rec.byte_count;
        row.label = rec.label;
        const auto it = last_seen.find(rec.flow_id);
        row.inner_time_flow = it == last_seen.end()
                                  ? 0.0
                                  : double(rec.timestamp - it->second) * 1e-9;
        last_seen[rec.flow_id] = rec.timestamp;
        out.push_back(row);
    }
    return out;
}

/// Per-flow behavioral summary.
struct FlowFeatures {
    std::uint64_t flow_id = 0;
    std::int32_t label = 0;
    std::size_t record_count = 0;
    double flow_duration = 0.0;       // final duration counter, seconds
    double packets_per_flow = 0.0;
    double bytes_per_flow = 0.0;
    double avg_packet_size = 0.0;
    double interarrival_mean = 0.0;     // over within-flow record gaps
    double interarrival_variance = 0.0; // population variance
    double syn_count = 0.0;             // records carrying each flag bit
    double ack_count = 0.0;
    double fin_count = 0.0;
    double directionality_ratio = 0.0;  // own packets / reverse-flow packets
};

inline const std::vector<std::string>& flow_feature_names() {
    static const std::vector<std::string> names{
        "flow_duration",     "packets_per_flow",      "bytes_per_flow", "avg_packet_size",
        "interarrival_mean", "interarrival_variance", "syn_count",      "ack_count",
        "fin_count",         "directionality_ratio"};
    return names;
}

/// Streaming per-flow statistics. Feeding records in timestamp order keeps
/// every aggregate consistent with what a monitor would know at that point;
/// after feeding everything the aggregates are the full-flow values.
class FlowStatsTracker {
  public:
    void update(const FlowRecord& rec) {
        State& st = flows_[rec.flow_id];
        if (st.record_count == 0) {
            st.features.flow_id = rec.flow_id;
            st.features.label = rec.label;
            st.reverse_id = flow_id_of(rec.key.reversed());
        }
        if (st.record_count > 0) {
            const double gap = double(rec.timestamp - st.last_timestamp) * 1e-9;
            st.gap_sum += gap;
            st.gap_sum_sq += gap * gap;
        }
        st.last_timestamp = rec.timestamp;
        ++st.record_count;
        st.features.record_count = st.record_count;
        st.features.flow_duration = rec.duration_seconds();
        st.features.packets_per_flow = double(rec.packet_count);
        st.features.bytes_per_flow = double(rec.byte_count);
        st.features.avg_packet_size =
            rec.packet_count > 0 ? double(rec.byte_count) / double(rec.packet_count) : 0.0;
        if (st.record_count > 1) {
            const double gaps = double(st.record_count - 1);
            st.features.interarrival_mean = st.gap_sum / gaps;
            const double var = st.gap_sum_sq / gaps -
                               st.features.interarrival_mean * st.features.interarrival_mean;
            st.features.interarrival_variance = var > 0.0 ? var : 0.0;
        }
        if (rec.flags & kFlagSyn) st.features.syn_count += 1.0;
        if (rec.flags & kFlagAck) st.features.ack_count += 1.0;
        if (rec.flags & kFlagFin) st.features.fin_count += 1.0;
    }

    /// directionality refreshed lazily: own final packets over the reverse
    /// flow's final packets, 0 while no reverse traffic exists
    FlowFeatures features_of(std::uint64_t flow_id) const {
        const auto it = flows_.find(flow_id);
        if (it == flows_.end()) return FlowFeatures{};
        FlowFeatures f = it->second.features;
        const auto rev = flows_.find(it->second.reverse_id);
        if (rev != flows_.end() && rev->second.features.packets_per_flow > 0.0) {
            f.directionality_ratio = f.packets_per_flow / rev->second.features.packets_per_flow;
        }
        return f;
    }

    std::size_t flow_count() const { return flows_.size(); }

  private:
    struct State {
        FlowFeatures features;
        std::uint64_t reverse_id = 0;
        std::size_t record_count = 0;
        std::int64_t last_timestamp = 0;
        double gap_sum = 0.0;
        double gap_sum_sq = 0.0;
    };
    std::unordered_map<std::uint64_t, State> flows_;
};

/// One FeatureVector per flow, in order of first appearance.
inline std::vector<FlowFeatures> extract_features(std::span<const FlowRecord> rows) {
    FlowStatsTracker tracker;
    std::vector<std::uint64_t> order;
    std::unordered_map<std::uint64_t, bool> seen;
    for (const FlowRecord& rec : rows) {
        if (!seen[rec.flow_id]) {
            seen[rec.flow_id] = true;
            order.push_back(rec.flow_id);
        }
        tracker.update(rec);
    }
    std::vector<FlowFeatures> out;
    out.reserve(order.size());
    for (std::uint64_t id : order) out.push_back(tracker.features_of(id));
    return out;
}

inline void fill_flow_features(const FlowFeatures& f, double* dst) {
    dst[0] = f.flow_duration;
    dst[1] = f.packets_per_flow;
    dst[2] = f.bytes_per_flow;
    dst[3] = f.avg_packet_size;
    dst[4] = f.interarrival_mean;
    dst[5] = f.interarrival_variance;
    dst[6] = f.syn_count;
    dst[7] = f.ack_count;
    dst[8] = f.fin_count;
    dst[9] = f.directionality_ratio;
}

/// Flow-level matrix (the Table-10 style view): one row per flow, the ten
/// behavioral aggregates as columns.
inline Matrix build_flow_matrix(std::span<const FlowFeatures> flows, std::vector<double>* labels) {
    Matrix x(flows.size(), flow_feature_names().size());
    x.column_names = flow_feature_names();
    if (labels) labels->clear();
    for (std::size_t i = 0; i < flows.size(); ++i) {
        fill_flow_features(flows[i], &x.at(i, 0));
        if (labels) labels->push_back(double(flows[i].label));
    }
    return x;
}

inline const std::vector<std::string>& record_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v = flow_feature_names();
        const char* extra[] = {"ip_src",    "tp_src",           "ip_dst",
                               "tp_dst",    "ip_proto",         "icmp_code",
                               "icmp_type", "flow_duration_sec", "flow_duration_nsec",
                               "packet_count", "byte_count",    "inner_time_flow"};
        for (const char* name : extra) v.push_back(name);
        return v;
    }();
    return names;
}

inline void fill_record_features(const PreparedRow& row, const FlowFeatures& f, double* dst) {
    fill_flow_features(f, dst);
    dst[10] = double(row.ip_src);
    dst[11] = double(row.tp_src);
    dst[12] = double(row.ip_dst);
    dst[13] = double(row.tp_dst);
    dst[14] = double(row.ip_proto);
    dst[15] = double(row.icmp_code);
    dst[16] = double(row.icmp_type);
    dst[17] = double(row.flow_duration_sec);
    dst[18] = double(row.flow_duration_nsec);
    dst[19] = double(row.packet_count);
    dst[20] = double(row.byte_count);
    dst[21] = row.inner_time_flow;
}

/// Record-level training matrix: every prepared column that carries
/// behavior (identifiers dropped) plus the owning flow's aggregates.
/// Aggregates are the full-flow values; the online path feeds the tracker
/// incrementally instead.
inline Matrix build_record_matrix(std::span<const FlowRecord> rows, std::vector<double>* labels) {
    const std::vector<PreparedRow> prepared = prepare(rows);
    FlowStatsTracker tracker;
    for (const FlowRecord& rec : rows) tracker.update(rec);

    Matrix x(rows.size(), record_feature_names().size());
    x.column_names = record_feature_names();
    if (labels) labels->clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const FlowFeatures f = tracker.features_of(rows[i].flow_id);
        fill_record_features(prepared[i], f, &x.at(i, 0));
        if (labels) labels->push_back(double(rows[i].label));
    }
    return x;
}

struct SplitSpec {
    double train_fraction = 0.70;
    double ratio_tolerance_pp = 5.0;  // percentage points
};

struct SplitResult {
    std::size_t split_index = 0;  // rows [0, split) train, [split, n) test
    double global_legit_fraction = 0.0;
    double train_legit_fraction = 0.0;
    double test_legit_fraction = 0.0;
};

/// Chronological 70/30 split. Verifies that both partitions carry the
/// global class mix within tolerance and that no attack session's rows
/// straddle the boundary.
inline SplitResult chronological_split(std::span<const FlowRecord> rows, const SplitSpec& spec,
                                       const AttackSchedule* schedule = nullptr) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0,1)");
    }
    if (rows.size() < 2) throw ValidationError("chronological_split: need at least 2 rows");
    std::int64_t prev = std::numeric_limits<std::int64_t>::min();
    for (const FlowRecord& rec : rows) {
        if (rec.timestamp < prev) throw ValidationError("chronological_split: rows not timestamp-sorted");
        prev = rec.timestamp;
    }

    SplitResult result;
    result.split_index = std::size_t(std::floor(spec.train_fraction * double(rows.size())));

    const auto legit_fraction = [&](std::size_t lo, std::size_t hi) {
        std::size_t legit = 0;
        for (std::size_t i = lo; i < hi; ++i) legit += rows[i].label == 0 ? 1 : 0;
        return double(legit) / double(hi - lo);
    };
    result.global_legit_fraction = legit_fraction(0, rows.size());
    result.train_legit_fraction = legit_fraction(0, result.split_index);
    result.test_legit_fraction = legit_fraction(result.split_index, rows.size());

    const double tol = spec.ratio_tolerance_pp / 100.0;
    if (std::abs(result.train_legit_fraction - result.global_legit_fraction) > tol ||
        std::abs(result.test_legit_fraction - result.global_legit_fraction) > tol) {
        throw ValidationError("chronological_split: partition class ratios drift beyond " +
                              std::to_string(spec.ratio_tolerance_pp) + " pp from the global mix");
    }

    if (schedule) {
        for (std::size_t e = 0; e < schedule->entries.size(); ++e) {
            const AttackEntry& entry = schedule->entries[e];
            bool in_train = false, in_test = false;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].label == 1 && matches_attack_signature(rows[i], entry)) {
                    (i < result.split_index ? in_train : in_test) = true;
                }
            }
            if (in_train && in_test) {
                throw ValidationError("chronological_split: attack session " + std::to_string(e) +
                                      " (" + attack_kind_name(entry.kind) + " at " +
                                      std::to_string(entry.start) + "s) straddles the boundary");
            }
        }
    }
    return result;
}

/// Class-balanced index batches over the training rows: each batch holds
/// batch_size/2 of each class, drawn without replacement per epoch; the
/// minority pool reshuffles and cycles when it runs out.
inline std::vector<std::vector<std::size_t>> balanced_batches(std::span<const double> labels,
                                                              std::size_t batch_size,
                                                              std::uint64_t seed) {
    if (batch_size == 0 || batch_size % 2 != 0) {
        throw ConfigError("balanced_batches: batch_size must be even and positive");
    }
    std::vector<std::size_t> zeros, ones;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 0.0 ? zeros : ones).push_back(i);
    if (zeros.empty() || ones.empty()) {
        throw ValidationError("balanced_batches: both classes must be present");
    }
    Rng rng(seed);
    rng.shuffle(zeros);
    rng.shuffle(ones);

    const bool zeros_major = zeros.size() >= ones.size();
    std::vector<std::size_t>& major = zeros_major ? zeros : ones;
    std::vector<std::size_t>& minor = zeros_major ? ones : zeros;
    const std::size_t half = batch_size / 2;

    std::vector<std::vector<std::size_t>> batches;
    std::size_t major_pos = 0, minor_pos = 0;
    while (major_pos + half <= major.size()) {
        std::vector<std::size_t> batch;
        batch.reserve(batch_size);
        for (std::size_t i = 0; i < half; ++i) batch.push_back(major[major_pos++]);
        for (std::size_t i = 0; i < half; ++i) {
            if (minor_pos == minor.size()) {
                rng.shuffle(minor);
                minor_pos = 0;
            }
            batch.push_back(minor[minor_pos++]);
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

/// Pairwise Pearson correlations between feature columns, emitted as a
/// diagnostic; constant columns correlate as 0.
inline Matrix correlation_matrix(const Matrix& x) {
    Matrix r(x.cols, x.cols);
    r.column_names = x.column_names;
    std::vector<double> mean(x.cols, 0.0), sd(x.cols, 0.0);
    for (std::size_t c = 0; c < x.cols; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) sum += x.at(i, c);
        mean[c] = sum / double(x.rows);
        double ss = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double d = x.at(i, c) - mean[c];
            ss += d * d;
        }
        sd[c] = std::sqrt(ss);
    }
    for (std::size_t a = 0; a < x.cols; ++a) {
        for (std::size_t b = a; b < x.cols; ++b) {
            double cov = 0.0;
            for (std::size_t i = 0; i < x.rows; ++i) {
                cov += (x.at(i, a) - mean[a]) * (x.at(i, b) - mean[b]);
            }
            const double denom = sd[a] * sd[b];
            const double val = denom > 0.0 ? cov / denom : (a == b ? 1.0 : 0.0);
            r.at(a, b) = val;
            r.at(b, a) = val;
        }
    }
    return r;
}

inline void write_correlation_csv(const Matrix& corr, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "feature";
    for (const std::string& name : corr.column_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < corr.rows; ++i) {
        out << corr.column_names[i];
        for (std::size_t j = 0; j < corr.cols; ++j) out << ',' << corr.at(i, j);
        out << '\n';
    }
}

}  // namespace mldas
