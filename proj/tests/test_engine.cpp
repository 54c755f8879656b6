#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ncrsim/config.hpp"
#include "ncrsim/engine.hpp"
#include "ncrsim/output.hpp"

using namespace ncrsim;

namespace {

RunConfig small(const char* scenario, bool ncr, std::uint64_t seed = 3) {
  RunConfig c;
  set_config_value(c, "scenario.id", scenario);
  set_config_value(c, "scenario.ncr", ncr ? "on" : "off");
  c.seed = seed;
  c.total_slots = 1600;
  c.warmup_slots = 400;
  finalize(c);
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c;
  apply_config_text(c, "# comment\nrun.seed = 42\nscenario.id = B\nue.count = 10\n");
  CHECK(c.seed == 42);
  CHECK(c.scenario_id == ScenarioId::B);
  CHECK(c.ue_count == 10);
  CHECK_THROWS_AS(apply_config_text(c, "no.such.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(c, "run.seed = abc\n"), ConfigError);
  finalize(c);
  RunConfig d = c;
  CHECK(config_hash(c) == config_hash(d));
  d.seed = 43;
  CHECK(config_hash(c) != config_hash(d));
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("identical runs are bit-identical, serial or threaded") {
  RunConfig a = small("A", true);
  RunConfig b = a;
  b.kernel = KernelKind::serial;
  const MetricsStore x = run(a);
  const MetricsStore y = run(b);
  REQUIRE(x.samples.size() == y.samples.size());
  for (std::size_t i = 0; i < x.samples.size(); ++i) CHECK(x.samples[i].sinr_db == y.samples[i].sinr_db);
  CHECK(x.counted_bits == y.counted_bits);
}

TEST_CASE("trajectories do not depend on the repeaters") {
  for (const char* s : {"A", "B"}) {
    Simulator on(small(s, true));
    Simulator off(small(s, false));
    for (int t = 0; t < 1200; ++t) {
      on.step();
      off.step();
    }
    CHECK(on.trajectory_digest() == off.trajectory_digest());
  }
}

TEST_CASE("samples start after warm-up and bits are conserved") {
  const RunConfig c = small("B", true);
  const MetricsStore m = run(c);
  REQUIRE_FALSE(m.samples.empty());
  for (const SampleRecord& s : m.samples) {
    CHECK(s.slot >= c.warmup_slots);
    CHECK((s.dir == Direction::dl) == (s.slot % 2 == 0));
    CHECK((s.link == LinkType::forwarded) == (s.ncr >= 0));
  }
  for (int d = 0; d < 2; ++d) {
    const auto& b = m.counted_bits[d];
    CHECK(std::accumulate(b.begin(), b.end(), std::int64_t{0}) == m.delivered_by_allocations[d]);
    for (int u = 0; u < m.ue_count; ++u) CHECK(b[u] <= m.counted_arrivals[d][u]);
    std::int64_t used = 0;
    for (auto v : m.mcs_usage[d]) used += v;
    std::int64_t n = 0;
    for (const SampleRecord& s : m.samples) n += dir_index(s.dir) == d;
    CHECK(used == n);
  }
}

TEST_CASE("macro-only runs produce no forwarded samples") {
  const MetricsStore m = run(small("A", false));
  for (const SampleRecord& s : m.samples) CHECK(s.link == LinkType::direct);
}

TEST_CASE("emitted files are byte-identical across runs") {
  const auto base = std::filesystem::temp_directory_path() / "ncrsim_emit_test";
  std::filesystem::remove_all(base);
  const RunConfig c = small("A", true, 5);
  emit(run(c), base / "a");
  emit(run(c), base / "b");
  for (const char* f : {"sinr_samples.csv", "throughput.csv", "mcs_usage.csv", "summary.json"}) {
    const std::string x = slurp(base / "a" / f);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(base / "b" / f));
  }
  std::filesystem::remove_all(base);
}

TEST_CASE("unwritable output directory is reported") {
  CHECK_THROWS_AS(preflight_output_dir("/proc/ncrsim_nope"), SimError);
}
