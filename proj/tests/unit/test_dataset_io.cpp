#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mldas/dataset_io.hpp"
#include "mldas/rng.hpp"

using namespace mldas;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

FlowRecord random_record(Rng& rng, std::int64_t timestamp) {
    FlowRecord rec;
    rec.timestamp = timestamp;
    rec.datapath_id = std::uint32_t(rng.below(2)) + 1;
    const std::uint8_t protos[] = {kProtoIcmp, kProtoTcp, kProtoUdp};
    rec.key.ip_proto = protos[rng.below(3)];
    rec.key.ip_src = std::uint32_t(rng.next_u64());
    rec.key.ip_dst = std::uint32_t(rng.next_u64());
    if (rec.key.ip_proto == kProtoIcmp) {
        rec.icmp_type = rng.chance(0.5) ? 8 : 0;
        rec.icmp_code = 0;
    } else {
        rec.key.tp_src = std::uint16_t(rng.below(65536));
        rec.key.tp_dst = std::uint16_t(rng.below(65536));
        if (rec.key.ip_proto == kProtoTcp) rec.flags = std::uint16_t(rng.below(32));
    }
    rec.flow_id = flow_id_of(rec.key);
    rec.flow_duration_sec = std::int64_t(rng.below(100));
    rec.flow_duration_nsec = std::int64_t(rng.below(1000000000));
    rec.packet_count = std::int64_t(rng.below(5000));
    rec.byte_count = rec.packet_count * std::int64_t(rng.below(1400) + 1);
    rec.label = rng.chance(0.3) ? 1 : 0;
    return rec;
}

}  // namespace

TEST_CASE("write_dataset emits header-only file for empty input") {
    const auto path = temp_file("mldas_empty.csv");
    CHECK(write_dataset(std::vector<FlowRecord>{}, path.string()) == 0);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == kRawHeader);
    CHECK_FALSE(std::getline(in, line));
    std::filesystem::remove(path);
}

TEST_CASE("prepared write counts header plus rows") {
    const auto path = temp_file("mldas_prep3.csv");
    std::vector<PreparedRow> rows(3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].flow_id = i + 1;
        rows[i].packet_count = 10;
        rows[i].byte_count = 100;
        rows[i].inner_time_flow = double(i) * 0.5;
    }
    CHECK(write_dataset(rows, path.string()) == 3);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 4);
    std::filesystem::remove(path);
}

TEST_CASE("raw dataset round trips exactly") {
    const auto path = temp_file("mldas_raw_rt.csv");
    Rng rng(11);
    std::vector<FlowRecord> rows;
    for (int i = 0; i < 500; ++i) rows.push_back(random_record(rng, i * 1000000));
    write_dataset(rows, path.string());
    const ReadResult result = read_dataset(path.string());
    REQUIRE(result.schema == DatasetSchema::Raw);
    REQUIRE(result.raw.size() == rows.size());
    CHECK(result.raw == rows);
    std::filesystem::remove(path);
}

TEST_CASE("prepared dataset round trips exactly") {
    const auto path = temp_file("mldas_prep_rt.csv");
    Rng rng(12);
    std::vector<PreparedRow> rows;
    for (int i = 0; i < 500; ++i) {
        PreparedRow row;
        row.datapath_id = std::int64_t(rng.below(2)) + 1;
        row.flow_id = rng.next_u64();
        row.ip_src = std::uint32_t(rng.next_u64());
        row.ip_dst = std::uint32_t(rng.next_u64());
        row.tp_src = std::int32_t(rng.below(65536));
        row.tp_dst = std::int32_t(rng.below(65536));
        row.ip_proto = 6;
        row.flow_duration_sec = std::int64_t(rng.below(50));
        row.flow_duration_nsec = std::int64_t(rng.below(1000000000));
        row.packet_count = std::int64_t(rng.below(1000)) + 1;
        row.byte_count = row.packet_count * 40;
        row.label = rng.chance(0.3) ? 1 : 0;
        row.inner_time_flow = rng.uniform(0.0, 3.0);
        rows.push_back(row);
    }
    write_dataset(rows, path.string());
    const ReadResult result = read_dataset(path.string());
    REQUIRE(result.schema == DatasetSchema::Prepared);
    CHECK(result.prepared == rows);
    std::filesystem::remove(path);
}

TEST_CASE("read_dataset rejects unknown and truncated headers") {
    const auto path = temp_file("mldas_badhdr.csv");
    {
        std::ofstream out(path);
        // prepared header missing its last column
        std::string hdr = kPreparedHeader.substr(0, kPreparedHeader.rfind(','));
        out << hdr << "\n";
    }
    CHECK_THROWS_AS(read_dataset(path.string()), SchemaError);
    {
        std::ofstream out(path);
        out << "foo,bar\n1,2\n";
    }
    CHECK_THROWS_AS(read_dataset(path.string()), SchemaError);
    std::filesystem::remove(path);
}

TEST_CASE("read_dataset reports the row index of an invariant violation") {
    const auto path = temp_file("mldas_badrow.csv");
    {
        std::vector<PreparedRow> rows(2);
        for (auto& r : rows) {
            r.packet_count = 1;
            r.byte_count = 40;
        }
        write_dataset(rows, path.string());
        // append a row with label = 2
        std::ofstream out(path, std::ios::app);
        out << "1,1,1,1,1,1,6,-1,-1,0,0,1,40,2,0\n";
    }
    try {
        read_dataset(path.string());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("missing file raises an IO error") {
    CHECK_THROWS_AS(read_dataset("/nonexistent/path/data.csv"), IoError);
}
