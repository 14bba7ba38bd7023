#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qnsk/checks.hpp"
#include "qnsk/config.hpp"
#include "qnsk/experiments.hpp"
#include "qnsk/fault_injection.hpp"
#include "qnsk/snapshot.hpp"

using namespace qnsk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qnsk_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_sweep(const fs::path& out) {
    ExperimentConfig c = parse_config(R"({
        "kind": "sweep_delta",
        "grid": {"d": 1, "ell": 5, "n": 64},
        "params": {"nu": 0.5, "eps": 0.5, "dt": {"policy": "fixed", "dt": 0.01}},
        "initial": {"lift": 0.05},
        "t_end": 0.1,
        "ladder": [0.01, 0.001, 0.0001]
    })");
    c.out_dir = out.string();
    return c;
}

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
    const ExperimentConfig c = parse_config(R"({"kind": "simulate"})");
    EXPECT_EQ(c.schema_version, kSchemaVersion);
    EXPECT_EQ(c.params.nu, 0.5);
    EXPECT_EQ(c.params.eps, 0.5);
    const std::string doc = dump_config(c);
    EXPECT_EQ(dump_config(parse_config(doc)), doc);
    EXPECT_EQ(config_hash(parse_config(doc)), config_hash(c));
}

TEST(Config, HashTracksContent) {
    ExperimentConfig a = parse_config(R"({"kind": "simulate"})");
    ExperimentConfig b = a;
    const std::string h = config_hash(a);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
    b.params.nu = 0.25;
    EXPECT_NE(config_hash(b), h);
}

TEST(Config, RejectsBadDocuments) {
    EXPECT_THROW(parse_config("{"), ConfigError);
    EXPECT_THROW(parse_config(R"({"kind": "nope"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"kind": "simulate", "bogus": 1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"params": {"nu": 0.1, "typo": 2}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 99})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"grid": {"n": 48}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"grid": {"d": 4}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"params": {"nu": 0, "eps": 0}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"kind": "sweep_delta"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"kind": "sweep_delta", "ladder": [0.1, 0.2, 0.15]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"kind": "korteweg_crosscheck"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"kind": "korteweg_crosscheck", "crosscheck": {"dt": [0.01], "delta_stab": []}})"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"kind": "sweep_drag_ell", "grid": {"ell": 4, "n": 64}, "ladder": [4, 6]})"),
                 ConfigError);
    EXPECT_NO_THROW(parse_config(R"({"kind": "sweep_drag_ell", "grid": {"ell": 4, "n": 64}, "ladder": [4, 8, 16]})"));
}

TEST(Csv, MetadataLineAndExactValues) {
    const std::string doc = csv_document(R"({"config_hash":"abc"})", {"a", "b"}, {{0.1, 1.0 / 3.0}, {2.0, -1e-300}});
    std::istringstream in(doc);
    std::string meta, header, row;
    std::getline(in, meta);
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(meta.rfind("# ", 0), 0u);
    EXPECT_EQ(nlohmann::json::parse(meta.substr(2)).at("config_hash"), "abc");
    EXPECT_EQ(header, "a,b");
    const size_t comma = row.find(',');
    EXPECT_EQ(std::stod(row.substr(0, comma)), 0.1);
    EXPECT_EQ(std::stod(row.substr(comma + 1)), 1.0 / 3.0);
}

TEST(Snapshot, RoundTripAndVersionCheck) {
    const fs::path dir = scratch("snap");
    fs::create_directories(dir);
    const Grid g(2, 3.0, 16);
    ScalarField f = radius_squared(g);
    const fs::path p = snapshot_path(dir, "snap_0001", "sqrtR");
    EXPECT_EQ(p.filename(), "snap_0001.sqrtR.isof");
    write_snapshot(p, f, 0.75);
    const Snapshot s = read_snapshot(p);
    EXPECT_EQ(s.t, 0.75);
    EXPECT_EQ(s.field.grid, g);
    EXPECT_EQ(s.field.v, f.v);
    {
        std::fstream io(p, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(4);
        const char bad[4] = {9, 0, 0, 0};
        io.write(bad, 4);
    }
    EXPECT_THROW(read_snapshot(p), SnapshotError);
    EXPECT_THROW(read_snapshot(dir / "missing.isof"), SnapshotError);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
    ExperimentConfig c1 = small_sweep(scratch("sweep1"));
    ExperimentConfig c2 = small_sweep(scratch("sweep2"));
    c2.threads = 3;
    const auto a = run_sweep(c1);
    const auto b = run_sweep(c2);
    ASSERT_EQ(a.size(), 3u);
    ASSERT_EQ(b.size(), 3u);
    for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].axis, c1.ladder[i]);
        EXPECT_EQ(a[i].status, RunStatus::completed);
        EXPECT_EQ(a[i].R.v, b[i].R.v) << i;
    }
    EXPECT_EQ(overlap_l2_distance(a[0].R, a[0].R), 0.0);
    EXPECT_GT(overlap_l2_distance(a[0].R, a[1].R), overlap_l2_distance(a[1].R, a[2].R));
}

TEST(Sweep, ArtifactsCarryConfigHash) {
    const fs::path out = scratch("sweep_art");
    ExperimentConfig c = small_sweep(out);
    std::ostringstream log;
    ASSERT_EQ(run_experiment(c, log), kExitOk) << log.str();
    const std::string csv = slurp(out / "sweep.csv");
    EXPECT_NE(csv.find(config_hash(c)), std::string::npos);
    ASSERT_TRUE(fs::exists(out / "run_00" / "meta.json"));
    ASSERT_TRUE(fs::exists(out / "run_02" / "diagnostics.csv"));
}

TEST(Simulate, WritesDiagnosticsAndSnapshots) {
    const fs::path out = scratch("sim");
    ExperimentConfig c = parse_config(R"({
        "kind": "simulate",
        "grid": {"d": 1, "ell": 5, "n": 64},
        "params": {"dt": {"policy": "fixed", "dt": 0.01}},
        "initial": {"generator": "perturbed_gaussian", "velocity": 0.2},
        "t_end": 0.05,
        "cadence": {"snapshot_every": 1, "diag_every": 1}
    })");
    c.out_dir = out.string();
    std::ostringstream log;
    ASSERT_EQ(run_experiment(c, log), kExitOk) << log.str();
    const auto meta = nlohmann::json::parse(slurp(out / "meta.json"));
    EXPECT_EQ(meta.at("config_hash"), config_hash(c));
    const Snapshot s = read_snapshot(snapshot_path(out, "snap_0005", "sqrtR"));
    EXPECT_NEAR(s.t, 0.05, 1e-12);
}

TEST(Tau, TableExperiment) {
    const fs::path out = scratch("tau");
    ExperimentConfig c;
    c.kind = ExperimentKind::tau;
    c.tau_t_max = 10.0;
    c.out_dir = out.string();
    std::ostringstream log;
    ASSERT_EQ(run_experiment(c, log), kExitOk) << log.str();
    EXPECT_NE(slurp(out / "tau.csv").find("residual"), std::string::npos);
}

TEST(Checks, FamiliesAndFilter) {
    const auto fam = check_families();
    for (const char* f : {"tau", "mass", "energy", "korteweg", "csiszar", "llogl", "bd", "lognls", "truncation"})
        EXPECT_NE(std::find(fam.begin(), fam.end(), f), fam.end()) << f;
    const auto r = run_checks("csiszar", 3);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_TRUE(r[0].passed) << r[0].detail;
    EXPECT_TRUE(run_checks("no_such_family").empty());
}

TEST(Checks, KortewegSignMutationIsCaught) {
    ASSERT_TRUE(run_checks("korteweg").at(0).passed);
    inject_fault(Fault::korteweg_sign);
    const auto r = run_checks("korteweg");
    inject_fault(Fault::none);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_FALSE(r[0].passed);
    EXPECT_NE(r[0].detail.find("korteweg_residual"), std::string::npos);
}
