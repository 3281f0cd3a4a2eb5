#include "offload/harness.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "offload/cli.hpp"
#include "offload/debo.hpp"
#include "test_util.hpp"

using namespace offload;
using namespace offload::testutil;
namespace fs = std::filesystem;

namespace {

std::string explicit_config(const std::string& algorithm, long long horizon, int replications,
                            const std::string& output_dir, const std::string& extra = "") {
  std::ostringstream os;
  os << R"({
  "environment": {
    "capacity_model": "homogeneous",
    "noise_half_width": 0.3, "reward_lower": 0.3, "reward_upper": 3.8,
    "users": [
      {"id": 1, "task_size_kb": 600,  "cycles_per_bit": 1000, "task_value": 3.1,  "latency_sensitivity": 0.25, "resource_demand": 0.6},
      {"id": 2, "task_size_kb": 900,  "cycles_per_bit": 1000, "task_value": 3.2,  "latency_sensitivity": 0.35, "resource_demand": 0.8},
      {"id": 3, "task_size_kb": 1200, "cycles_per_bit": 1000, "task_value": 3.4,  "latency_sensitivity": 0.45, "resource_demand": 0.7},
      {"id": 4, "task_size_kb": 1500, "cycles_per_bit": 1000, "task_value": 3.5,  "latency_sensitivity": 0.3,  "resource_demand": 0.9}
    ],
    "servers": [
      {"id": 1, "tx_rate_mbps": 11, "cpu_speed_ghz": 7.5, "task_capacity": 2, "resource_capacity": 2.2},
      {"id": 2, "tx_rate_mbps": 9,  "cpu_speed_ghz": 4.5, "task_capacity": 3, "resource_capacity": 1.9}
    ]
  },
  "experiment": {
    "algorithm": ")"
     << algorithm << R"(",
    "horizon": )" << horizon
     << R"(,
    "replications": )"
     << replications << R"(,
    "master_seed": 97,
    "output_dir": ")"
     << output_dir << R"(",
    "overrides": {"t1_cap": 100})"
     << extra << R"(
  }
})";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path unique_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("offload_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("explicit config loads with converted units", "[harness]") {
  const auto loaded = load_config_text(explicit_config("debo", 1024, 1, "unused"));
  REQUIRE(loaded.env.num_users() == 4);
  REQUIRE(loaded.env.num_servers() == 2);
  CHECK(loaded.env.users()[0].task_size_bits == Catch::Approx(600 * 8000.0));
  CHECK(loaded.env.servers()[0].tx_rate_bits_per_s == Catch::Approx(11e6));
  CHECK(loaded.env.servers()[0].cpu_speed_cycles_per_s == Catch::Approx(7.5e9));
  CHECK(loaded.gaps.delta_min > 0);
  CHECK(loaded.oracle.value > 0);
  CHECK_FALSE(loaded.config_hash.empty());
}

TEST_CASE("range config draws a pinned instance", "[harness]") {
  const std::string text = R"({
  "environment": {
    "capacity_model": "homogeneous",
    "num_users": 4, "num_servers": 2, "instance_seed": 11,
    "noise_half_width": 0.3, "reward_lower": 0.3, "reward_upper": 3.8,
    "user_ranges": {"task_size_kb": [500, 1600], "cycles_per_bit": 1000,
                    "task_value": [3.0, 3.5], "latency_sensitivity": [0.2, 0.5],
                    "resource_demand": [0.5, 1.0]},
    "server_ranges": {"tx_rate_mbps": [9, 11], "cpu_speed_ghz": [4, 8],
                      "task_capacity": [2, 5], "resource_capacity": [2.0, 3.5]}
  },
  "experiment": {"algorithm": "debo", "horizon": 256, "replications": 1,
                 "master_seed": 5, "output_dir": "unused"}
})";
  const auto a = load_config_text(text);
  const auto b = load_config_text(text);
  REQUIRE(a.env.num_users() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(a.env.users()[i].task_size_bits == b.env.users()[i].task_size_bits);
    CHECK(a.env.users()[i].task_value == b.env.users()[i].task_value);
  }
  CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("validation failures carry field-level messages", "[harness]") {
  SECTION("too many users for the slots") {
    std::string text = explicit_config("debo", 128, 1, "x");
    // Shrink both servers to one slot each: 4 users, 2 slots.
    const auto pos = text.find("\"task_capacity\": 2");
    text.replace(pos, 18, "\"task_capacity\": 1");
    const auto pos2 = text.find("\"task_capacity\": 3");
    text.replace(pos2, 18, "\"task_capacity\": 1");
    CHECK_THROWS_WITH(load_config_text(text),
                      Catch::Matchers::ContainsSubstring("task slots"));
  }
  SECTION("duplicate user ids") {
    std::string text = explicit_config("debo", 128, 1, "x");
    const auto pos = text.find("\"id\": 2");
    text.replace(pos, 7, "\"id\": 1");
    CHECK_THROWS_WITH(load_config_text(text),
                      Catch::Matchers::ContainsSubstring("duplicate user id"));
  }
  SECTION("parse errors are config errors") {
    CHECK_THROWS_AS(load_config_text("{ not json"), ConfigError);
  }
  SECTION("events demand the ddebo algorithm") {
    const std::string extra =
        R"(, "events": [{"epoch": 2, "kind": "leave", "user_id": 1}])";
    CHECK_THROWS_WITH(load_config_text(explicit_config("debo", 128, 1, "x", extra)),
                      Catch::Matchers::ContainsSubstring("ddebo"));
  }
}

TEST_CASE("content hash distinguishes documents", "[harness]") {
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
}

TEST_CASE("regret of oracle replay is identically zero", "[harness]") {
  const auto loaded = load_config_text(explicit_config("debo", 64, 1, "unused"));
  const auto& env = loaded.env;
  Rng rng(3);
  TraceBuilder tb(env.num_users(), 64);
  EpochEngine engine(env, 64, tb, rng);
  engine.exploit(loaded.oracle.assignment, 64, 1);
  const auto trace = tb.finish();
  const auto regret = compute_regret(trace, loaded.oracle.value, RegretKind::homogeneous);
  for (double r : regret) CHECK(r == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("regret of an idle policy grows like t times the optimum", "[harness]") {
  const auto loaded = load_config_text(explicit_config("debo", 64, 1, "unused"));
  const auto& env = loaded.env;
  Rng rng(3);
  TraceBuilder tb(env.num_users(), 64);
  EpochEngine engine(env, 64, tb, rng);
  engine.exploit(Assignment(env.num_users(), 0), 64, 1);
  const auto trace = tb.finish();
  const auto regret = compute_regret(trace, loaded.oracle.value, RegretKind::homogeneous);
  for (size_t t = 0; t < regret.size(); ++t) {
    CHECK(regret[t] == Catch::Approx((t + 1) * loaded.oracle.value));
  }
}

TEST_CASE("streamed checkpoint metrics equal recomputation from raw slots", "[harness]") {
  const auto loaded = load_config_text(explicit_config("debo", 2048, 1, "unused"));
  const auto trace = run_algorithm(loaded, 123);
  const auto summary =
      summarize_metrics(trace, loaded.oracle.value, RegretKind::homogeneous);
  const auto regret = compute_regret(trace, loaded.oracle.value, RegretKind::homogeneous);
  REQUIRE(summary.rows.size() == trace.checkpoints.size());
  for (const auto& row : summary.rows) {
    // Bitwise equality: both paths accumulate the same series in slot order.
    REQUIRE(row.regret == regret[row.t - 1]);
  }
}

TEST_CASE("checkpoint schedule is geometric and ends at the horizon", "[harness]") {
  const auto cps = checkpoint_slots(2048);
  REQUIRE(cps.front() == 1);
  REQUIRE(cps.back() == 2048);
  for (size_t i = 1; i + 1 < cps.size(); ++i) CHECK(cps[i] == 2 * cps[i - 1]);

  const auto odd = checkpoint_slots(1000);
  CHECK(odd.back() == 1000);
  CHECK(odd[odd.size() - 2] == 512);
}

TEST_CASE("experiment reruns are byte identical", "[harness]") {
  const auto dir = unique_dir("determinism");
  const auto loaded =
      load_config_text(explicit_config("debo", 2048, 1, (dir / "run").string()));
  const auto first = run_experiment(loaded, /*quiet=*/true);
  const std::string replica = read_file(first.replica_files[0]);
  const std::string aggregate = read_file(first.aggregate_file);
  const std::string metadata = read_file(first.metadata_file);
  REQUIRE_FALSE(replica.empty());

  const auto second = run_experiment(loaded, /*quiet=*/true);
  CHECK(read_file(second.replica_files[0]) == replica);
  CHECK(read_file(second.aggregate_file) == aggregate);
  CHECK(read_file(second.metadata_file) == metadata);
  fs::remove_all(dir);
}

TEST_CASE("aggregate bookkeeping has replica, mean and std rows", "[harness]") {
  const auto dir = unique_dir("aggregate");
  const auto loaded =
      load_config_text(explicit_config("debo", 512, 3, (dir / "run").string()));
  const auto result = run_experiment(loaded, /*quiet=*/true);
  REQUIRE(result.replicas.size() == 3);

  const std::string agg = read_file(result.aggregate_file);
  std::istringstream lines(agg);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0, mean_rows = 0, std_rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.find(",mean,") != std::string::npos) ++mean_rows;
    if (line.find(",std,") != std::string::npos) ++std_rows;
  }
  const int checkpoints = static_cast<int>(checkpoint_slots(512).size());
  CHECK(rows == checkpoints * (3 + 2));
  CHECK(mean_rows == checkpoints);
  CHECK(std_rows == checkpoints);
  fs::remove_all(dir);
}

TEST_CASE("slot dumps can be replayed against the compact trace", "[harness]") {
  const auto dir = unique_dir("slots");
  std::string text = explicit_config("debo", 256, 1, (dir / "run").string());
  // dump_slots belongs to the experiment section.
  const auto pos = text.find("\"overrides\"");
  text.insert(pos, "\"dump_slots\": true,\n    ");
  const auto loaded = load_config_text(text);
  REQUIRE(loaded.experiment.dump_slots);
  const auto result = run_experiment(loaded, /*quiet=*/true);
  const std::string dump = read_file((fs::path(result.output_dir) / "slots_replica_0.csv").string());
  std::istringstream lines(dump);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "t,epoch,phase,server_1,server_2,server_3,server_4,reward_1,reward_2,reward_3,"
        "reward_4");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 256);
  fs::remove_all(dir);
}

TEST_CASE("cli validate, oracle and run round trip", "[harness]") {
  const auto dir = unique_dir("cli");
  const fs::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg);
    out << explicit_config("debo", 512, 1, (dir / "out").string());
  }
  CHECK(cli_main({"validate", "--config", cfg.string()}) == 0);
  CHECK(cli_main({"oracle", "--config", cfg.string()}) == 0);
  CHECK(cli_main({"run", "--config", cfg.string(), "--quiet"}) == 0);
  CHECK(fs::exists(dir / "out" / "aggregate.csv"));
  CHECK(fs::exists(dir / "out" / "metadata.json"));

  // Overrides reroute the output.
  CHECK(cli_main({"run", "--config", cfg.string(), "--quiet", "--output",
                  (dir / "other").string(), "--horizon", "256"}) == 0);
  CHECK(fs::exists(dir / "other" / "aggregate.csv"));
  fs::remove_all(dir);
}

TEST_CASE("cli reports configuration failures with exit code two", "[harness]") {
  const auto dir = unique_dir("cli_bad");
  const fs::path cfg = dir / "bad.json";
  {
    std::ofstream out(cfg);
    out << "{ \"environment\": {} }";
  }
  CHECK(cli_main({"validate", "--config", cfg.string()}) == 2);
  CHECK(cli_main({"validate", "--config", (dir / "missing.json").string()}) == 2);
  fs::remove_all(dir);
}
