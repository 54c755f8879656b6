#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ncrsim/channel.hpp"
#include "ncrsim/mac.hpp"
#include "ncrsim/ncr.hpp"
#include "ncrsim/phy.hpp"
#include "ncrsim/scenario.hpp"

namespace ncrsim {

enum class KernelKind { serial, omp };

/// Everything a run depends on. `scenario` is derived by finalize() from the
/// scenario fields, placement overrides and UE/radio settings.
struct RunConfig {
  ScenarioId scenario_id = ScenarioId::A;
  bool ncr_enabled = true;
  std::uint64_t seed = 1;
  std::int64_t total_slots = 40000;
  std::int64_t warmup_slots = 4000;
  std::string output_dir;
  std::set<std::string> trace_flags;

  int ue_count = 72;
  double ue_speed_kmh = 3.0;
  double ue_height_m = 1.5;
  double carrier_ghz = 28.0;
  double scs_khz = 60.0;
  double downtilt_deg = 12.0;
  double refresh_distance_m = 1.0;

  RadioParams radio;
  ChannelParams channel;
  TrafficParams traffic;

  std::int64_t access_period_slots = 80;
  std::int64_t backhaul_period_slots = 0;
  int max_ues_per_slot = 8;
  double outage_rsrp_dbm = kOutageRsrpDbm;

  bool auto_schedule = true;
  bool debug_checks = false;
  KernelKind kernel = KernelKind::omp;

  PlacementOverrides placements;
  /// Per repeater, SCIs loaded from the config file (used as given).
  std::map<int, std::vector<SideControlInfo>> sci;

  ScenarioConfig scenario;
};

/// Applies `key = value` lines (with `#` comments) on top of `cfg`. Unknown
/// keys and malformed values throw ConfigError naming the key and line.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source = "config");
void apply_config_file(RunConfig& cfg, const std::string& path);
/// Sets one key; used by the parser and by command-line overrides.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Validates and builds the derived scenario.
void finalize(RunConfig& cfg);

/// Sorted `key = value` listing of every effective setting except output
/// location and traces.
std::string canonical_config(const RunConfig& cfg);
/// Git blob SHA-1 of the canonical config.
std::string config_hash(const RunConfig& cfg);
std::string git_blob_sha1(const std::string& content);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace ncrsim
