#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ncrsim/rng.hpp"

namespace ncrsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 lift(Vec2 p, double height) { return {p.x, p.y, height}; }

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  Vec2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
  bool contains(Vec2 p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
};

enum class Heading { east, north, west, south };

Vec2 heading_vector(Heading h);
Heading turned_left(Heading h);
Heading turned_right(Heading h);

enum class Zone { block, sidewalk, street, outside };

enum class CorridorSide { north, south, east, west };

/// One straight strip of the sidewalk ring around a block. North/south strips
/// own the corner squares, so the strips of one ring do not overlap.
struct Corridor {
  Rect rect;
  CorridorSide side;
  int col = 0;
  int row = 0;

  bool horizontal() const { return side == CorridorSide::north || side == CorridorSide::south; }
};

/// Simplified Madrid grid: n x n square blocks, each ringed by a sidewalk,
/// separated by streets. Blocks are infinitely tall occluders.
struct GridLayout {
  int block_count_per_side = 3;
  double block_size_m = 120.0;
  double sidewalk_width_m = 3.0;
  double street_width_m = 14.0;
  Vec2 origin{};

  double pitch() const { return block_size_m + 2.0 * sidewalk_width_m + street_width_m; }
  double extent() const;
  Rect bounds() const;

  Rect block(int col, int row) const;
  std::vector<Rect> blocks() const;
  std::vector<Rect> streets() const;
  std::vector<Corridor> sidewalk_corridors() const;

  Zone classify(Vec2 p) const;
  bool on_sidewalk(Vec2 p, double tol = 0.0) const;
  /// Block whose sidewalk ring contains p (clamped to the grid).
  std::array<int, 2> ring_of(Vec2 p) const;

  void validate() const;
  /// CSV with header `kind,x0,y0,x1,y1`; kinds are block, sidewalk and street.
  void write_csv(std::ostream& os) const;
};

/// True when the ground projection of a-b crosses the interior of any block.
/// Grazing a facade or a corner does not count as blocked.
bool segment_blocked(const Vec3& a, const Vec3& b, const GridLayout& layout);

enum class ScenarioId { A, B };

ScenarioId parse_scenario_id(const std::string& s);
const char* to_string(ScenarioId id);

struct GnbPlacement {
  Vec2 position;
  double height_m = 25.0;
  double azimuth_rad = 0.0;
};

struct NcrPlacement {
  Vec2 position;
  double height_m = 10.0;
  double gnb_side_azimuth_rad = 0.0;
  double ue_side_azimuth_rad = 0.0;
  int controlling_gnb = 0;
};

/// Key-by-key placement overrides, e.g. `gnb.0.x`, `ncr.1.ue_side_azimuth_deg`.
using PlacementOverrides = std::map<std::string, double>;

struct ScenarioConfig {
  ScenarioId scenario_id = ScenarioId::A;
  bool ncr_enabled = true;
  GridLayout layout;
  std::vector<GnbPlacement> gnbs;
  std::vector<NcrPlacement> ncrs;
  int ue_count = 72;
  int rb_count = 66;
  double carrier_hz = 28e9;
  double scs_hz = 60e3;
  double slot_s = 0.25e-3;
  int symbols_per_slot = 14;
  int subcarriers_per_rb = 12;
  double ue_speed_mps = 3.0 / 3.6;
  double ue_height_m = 1.5;

  double rb_bandwidth_hz() const { return scs_hz * subcarriers_per_rb; }
  double carrier_bandwidth_hz() const { return rb_bandwidth_hz() * rb_count; }
};

ScenarioConfig build_scenario(ScenarioId id, bool ncr_enabled,
                              const PlacementOverrides* overrides = nullptr);

/// Throws ConfigError naming the offending node or pair.
void validate_scenario(const ScenarioConfig& cfg);

struct UeMobilityState {
  Vec2 position;
  Heading heading = Heading::east;
  double speed_mps = 3.0 / 3.6;
  double height_m = 1.5;
};

std::vector<UeMobilityState> spawn_ues(const ScenarioConfig& cfg, std::uint64_t seed);

/// Area-weighted uniform placement over the given corridors. UE i draws from
/// its own stream, so the first k UEs do not depend on the total count.
std::vector<UeMobilityState> spawn_ues(std::span<const Corridor> corridors, int count,
                                       std::uint64_t seed, double speed_mps, double height_m);

enum class Turn { straight = 0, left = 1, right = 2 };

struct TurnMask {
  bool straight = true;
  bool left = true;
  bool right = true;

  bool any() const { return straight || left || right; }
};

/// (straight, left, right) = (0.6, 0.2, 0.2) rescaled over the available options.
std::array<double, 3> turn_probabilities(TurnMask mask);
Turn draw_turn(TurnMask mask, double u);

/// Options at a ring corner. Street crossings are not allowed, so only the
/// turn that keeps following the same block is ever available.
TurnMask available_turns(const GridLayout& layout, Vec2 corner, Heading heading);

UeMobilityState step_ue(const UeMobilityState& state, double dt_s, const GridLayout& layout,
                        RngStream& rng);

}  // namespace ncrsim
