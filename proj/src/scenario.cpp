#include "ncrsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "ncrsim/common.hpp"

namespace ncrsim {

Vec2 heading_vector(Heading h) {
  switch (h) {
    case Heading::east: return {1.0, 0.0};
    case Heading::north: return {0.0, 1.0};
    case Heading::west: return {-1.0, 0.0};
    case Heading::south: return {0.0, -1.0};
  }
  return {};
}

Heading turned_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }
Heading turned_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }

// ---------------------------------------------------------------------------
// GridLayout

double GridLayout::extent() const {
  const int n = block_count_per_side;
  return n * block_size_m + 2.0 * n * sidewalk_width_m + (n - 1) * street_width_m;
}

Rect GridLayout::bounds() const {
  return {origin.x, origin.y, origin.x + extent(), origin.y + extent()};
}

Rect GridLayout::block(int col, int row) const {
  const double x0 = origin.x + sidewalk_width_m + col * pitch();
  const double y0 = origin.y + sidewalk_width_m + row * pitch();
  return {x0, y0, x0 + block_size_m, y0 + block_size_m};
}

std::vector<Rect> GridLayout::blocks() const {
  std::vector<Rect> out;
  for (int row = 0; row < block_count_per_side; ++row)
    for (int col = 0; col < block_count_per_side; ++col) out.push_back(block(col, row));
  return out;
}

std::vector<Rect> GridLayout::streets() const {
  // Full-length corridors; the crossings are counted in the vertical ones only.
  std::vector<Rect> out;
  const Rect b = bounds();
  const double ring = block_size_m + 2.0 * sidewalk_width_m;
  for (int k = 0; k + 1 < block_count_per_side; ++k) {
    const double s0 = k * pitch() + ring;
    out.push_back({b.x0 + s0, b.y0, b.x0 + s0 + street_width_m, b.y1});
  }
  for (int k = 0; k + 1 < block_count_per_side; ++k) {
    const double s0 = k * pitch() + ring;
    for (int col = 0; col < block_count_per_side; ++col) {
      const double x0 = b.x0 + col * pitch();
      out.push_back({x0, b.y0 + s0, x0 + ring, b.y0 + s0 + street_width_m});
    }
  }
  return out;
}

std::vector<Corridor> GridLayout::sidewalk_corridors() const {
  std::vector<Corridor> out;
  const double w = sidewalk_width_m;
  for (int row = 0; row < block_count_per_side; ++row) {
    for (int col = 0; col < block_count_per_side; ++col) {
      const Rect r = block(col, row);
      out.push_back({{r.x0 - w, r.y1, r.x1 + w, r.y1 + w}, CorridorSide::north, col, row});
      out.push_back({{r.x0 - w, r.y0 - w, r.x1 + w, r.y0}, CorridorSide::south, col, row});
      out.push_back({{r.x1, r.y0, r.x1 + w, r.y1}, CorridorSide::east, col, row});
      out.push_back({{r.x0 - w, r.y0, r.x0, r.y1}, CorridorSide::west, col, row});
    }
  }
  return out;
}

namespace {

enum class Band { sidewalk, block, street, outside };

Band classify_axis(double u, const GridLayout& g) {
  const double ext = g.extent();
  if (u < 0.0 || u > ext) return Band::outside;
  const int k = std::min(static_cast<int>(std::floor(u / g.pitch())), g.block_count_per_side - 1);
  const double r = u - k * g.pitch();
  const double w = g.sidewalk_width_m;
  if (r < w) return Band::sidewalk;
  if (r < w + g.block_size_m) return Band::block;
  if (r <= 2.0 * w + g.block_size_m) return Band::sidewalk;
  return Band::street;
}

}  // namespace

Zone GridLayout::classify(Vec2 p) const {
  const Band bx = classify_axis(p.x - origin.x, *this);
  const Band by = classify_axis(p.y - origin.y, *this);
  if (bx == Band::outside || by == Band::outside) return Zone::outside;
  if (bx == Band::street || by == Band::street) return Zone::street;
  if (bx == Band::block && by == Band::block) return Zone::block;
  return Zone::sidewalk;
}

bool GridLayout::on_sidewalk(Vec2 p, double tol) const {
  const auto rc = ring_of(p);
  const Rect b = block(rc[0], rc[1]);
  const double w = sidewalk_width_m;
  const Rect ring{b.x0 - w, b.y0 - w, b.x1 + w, b.y1 + w};
  if (!ring.contains(p, tol)) return false;
  // Strictly inside the block (beyond tolerance) is not sidewalk.
  const bool inside_block = p.x > b.x0 + tol && p.x < b.x1 - tol && p.y > b.y0 + tol && p.y < b.y1 - tol;
  return !inside_block;
}

std::array<int, 2> GridLayout::ring_of(Vec2 p) const {
  const int n = block_count_per_side;
  const int col = std::clamp(static_cast<int>(std::floor((p.x - origin.x) / pitch())), 0, n - 1);
  const int row = std::clamp(static_cast<int>(std::floor((p.y - origin.y) / pitch())), 0, n - 1);
  return {col, row};
}

void GridLayout::validate() const {
  if (block_count_per_side < 1) throw ConfigError("layout.block_count_per_side must be >= 1");
  if (!(block_size_m > 0.0)) throw ConfigError("layout.block_size_m must be > 0");
  if (!(sidewalk_width_m > 0.0)) throw ConfigError("layout.sidewalk_width_m must be > 0");
  if (!(street_width_m > 0.0)) throw ConfigError("layout.street_width_m must be > 0");
}

void GridLayout::write_csv(std::ostream& os) const {
  os << "kind,x0,y0,x1,y1\n";
  auto row = [&os](const char* kind, const Rect& r) {
    os << kind << ',' << r.x0 << ',' << r.y0 << ',' << r.x1 << ',' << r.y1 << '\n';
  };
  for (const Rect& r : blocks()) row("block", r);
  for (const Corridor& c : sidewalk_corridors()) row("sidewalk", c.rect);
  for (const Rect& r : streets()) row("street", r);
}

// ---------------------------------------------------------------------------
// Line of sight

namespace {

// Liang-Barsky clip of p + t*d, t in [0,1], against a closed rectangle.
bool clip(Vec2 p, Vec2 d, const Rect& r, double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  const double ps[4] = {-d.x, d.x, -d.y, d.y};
  const double qs[4] = {p.x - r.x0, r.x1 - p.x, p.y - r.y0, r.y1 - p.y};
  for (int i = 0; i < 4; ++i) {
    if (ps[i] == 0.0) {
      if (qs[i] < 0.0) return false;
      continue;
    }
    const double t = qs[i] / ps[i];
    if (ps[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

bool segment_blocked(const Vec3& a, const Vec3& b, const GridLayout& layout) {
  const Vec2 p{a.x, a.y};
  const Vec2 d{b.x - a.x, b.y - a.y};
  const double len = std::hypot(d.x, d.y);
  for (const Rect& r : layout.blocks()) {
    double t0 = 0.0;
    double t1 = 0.0;
    if (!clip(p, d, r, t0, t1)) continue;
    if ((t1 - t0) * len <= 1e-9) continue;  // touches a corner only
    const double tm = 0.5 * (t0 + t1);
    const Vec2 m{p.x + tm * d.x, p.y + tm * d.y};
    if (m.x > r.x0 && m.x < r.x1 && m.y > r.y0 && m.y < r.y1) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Scenarios

ScenarioId parse_scenario_id(const std::string& s) {
  if (s == "A" || s == "a") return ScenarioId::A;
  if (s == "B" || s == "b") return ScenarioId::B;
  throw ConfigError("unknown scenario id '" + s + "' (expected A or B)");
}

const char* to_string(ScenarioId id) { return id == ScenarioId::A ? "A" : "B"; }

namespace {

double azimuth_to(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

void apply_overrides(ScenarioConfig& cfg, const PlacementOverrides& overrides,
                     std::set<int>& explicit_gnb_side) {
  for (const auto& [key, value] : overrides) {
    const auto d1 = key.find('.');
    const auto d2 = key.find('.', d1 == std::string::npos ? d1 : d1 + 1);
    if (d1 == std::string::npos || d2 == std::string::npos)
      throw ConfigError("malformed placement key '" + key + "'");
    const std::string kind = key.substr(0, d1);
    const std::string field = key.substr(d2 + 1);
    int idx = -1;
    try {
      std::size_t used = 0;
      idx = std::stoi(key.substr(d1 + 1, d2 - d1 - 1), &used);
      if (used != d2 - d1 - 1) idx = -1;
    } catch (const std::exception&) {
      idx = -1;
    }
    if (kind == "gnb") {
      if (idx < 0 || idx >= static_cast<int>(cfg.gnbs.size()))
        throw ConfigError("placement key '" + key + "' refers to a gNB that does not exist");
      GnbPlacement& g = cfg.gnbs[idx];
      if (field == "x") g.position.x = value;
      else if (field == "y") g.position.y = value;
      else if (field == "height_m") g.height_m = value;
      else if (field == "azimuth_deg") g.azimuth_rad = deg_to_rad(value);
      else throw ConfigError("unknown placement key '" + key + "'");
    } else if (kind == "ncr") {
      if (idx < 0 || idx >= static_cast<int>(cfg.ncrs.size()))
        throw ConfigError("placement key '" + key + "' refers to an NCR that does not exist");
      NcrPlacement& n = cfg.ncrs[idx];
      if (field == "x") n.position.x = value;
      else if (field == "y") n.position.y = value;
      else if (field == "height_m") n.height_m = value;
      else if (field == "gnb_side_azimuth_deg") {
        n.gnb_side_azimuth_rad = deg_to_rad(value);
        explicit_gnb_side.insert(idx);
      } else if (field == "ue_side_azimuth_deg") n.ue_side_azimuth_rad = deg_to_rad(value);
      else if (field == "controller") {
        if (value != std::floor(value)) throw ConfigError("placement key '" + key + "' must be an integer");
        n.controlling_gnb = static_cast<int>(value);
      } else throw ConfigError("unknown placement key '" + key + "'");
    } else {
      throw ConfigError("unknown placement key '" + key + "'");
    }
  }
}

}  // namespace

ScenarioConfig build_scenario(ScenarioId id, bool ncr_enabled, const PlacementOverrides* overrides) {
  ScenarioConfig cfg;
  cfg.scenario_id = id;
  cfg.ncr_enabled = ncr_enabled;

  const GridLayout& g = cfg.layout;
  const Rect c = g.block(g.block_count_per_side / 2, g.block_count_per_side / 2);
  const Vec2 mid = c.center();
  const double off = g.sidewalk_width_m / 2.0;  // centre of the sidewalk

  // Facade midpoints of the central block, each looking down its street.
  const GnbPlacement east{{c.x1 + off, mid.y}, 25.0, kPi / 2.0};
  const GnbPlacement north{{mid.x, c.y1 + off}, 25.0, kPi};
  const GnbPlacement west{{c.x0 - off, mid.y}, 25.0, -kPi / 2.0};
  const GnbPlacement south{{mid.x, c.y0 - off}, 25.0, 0.0};

  // Sidewalk corners of the central block; every corner sits at a crossing
  // and so sees two full street corridors.
  const Vec2 ne{c.x1 + off, c.y1 + off};
  const Vec2 nw{c.x0 - off, c.y1 + off};
  const Vec2 sw{c.x0 - off, c.y0 - off};
  const Vec2 se{c.x1 + off, c.y0 - off};

  if (id == ScenarioId::A) {
    cfg.gnbs = {east, west};
    if (ncr_enabled) {
      cfg.ncrs = {{ne, 10.0, 0.0, kPi, 0}, {sw, 10.0, 0.0, 0.0, 1}};
    }
  } else {
    cfg.gnbs = {east, north, west, south};
    if (ncr_enabled) {
      cfg.ncrs = {{ne, 10.0, 0.0, 0.0, 0},
                  {nw, 10.0, 0.0, kPi / 2.0, 1},
                  {sw, 10.0, 0.0, kPi, 2},
                  {se, 10.0, 0.0, -kPi / 2.0, 3}};
    }
  }

  std::set<int> explicit_gnb_side;
  if (overrides != nullptr) apply_overrides(cfg, *overrides, explicit_gnb_side);

  for (std::size_t i = 0; i < cfg.ncrs.size(); ++i) {
    NcrPlacement& n = cfg.ncrs[i];
    if (explicit_gnb_side.count(static_cast<int>(i)) != 0) continue;
    if (n.controlling_gnb >= 0 && n.controlling_gnb < static_cast<int>(cfg.gnbs.size()))
      n.gnb_side_azimuth_rad = azimuth_to(n.position, cfg.gnbs[n.controlling_gnb].position);
  }

  validate_scenario(cfg);
  return cfg;
}

void validate_scenario(const ScenarioConfig& cfg) {
  cfg.layout.validate();
  if (cfg.gnbs.empty()) throw ConfigError("scenario has no gNBs");
  if (cfg.ue_count < 0) throw ConfigError("ue.count must be >= 0");
  if (cfg.rb_count < 1) throw ConfigError("radio.rb_count must be >= 1");
  const Rect bounds = cfg.layout.bounds();
  auto check_point = [&](const std::string& name, Vec2 p) {
    if (!bounds.contains(p))
      throw ConfigError(name + " is placed outside the grid extent");
    if (cfg.layout.classify(p) == Zone::block)
      throw ConfigError(name + " is placed inside a building block");
  };
  for (std::size_t i = 0; i < cfg.gnbs.size(); ++i)
    check_point("gnb." + std::to_string(i), cfg.gnbs[i].position);
  for (std::size_t i = 0; i < cfg.ncrs.size(); ++i) {
    const NcrPlacement& n = cfg.ncrs[i];
    const std::string name = "ncr." + std::to_string(i);
    check_point(name, n.position);
    if (n.controlling_gnb < 0 || n.controlling_gnb >= static_cast<int>(cfg.gnbs.size()))
      throw ConfigError(name + " references controlling gNB " + std::to_string(n.controlling_gnb) +
                        " which does not exist");
    const GnbPlacement& g = cfg.gnbs[n.controlling_gnb];
    if (segment_blocked(lift(g.position, g.height_m), lift(n.position, n.height_m), cfg.layout))
      throw ConfigError(name + " has no line of sight to its controlling gnb." +
                        std::to_string(n.controlling_gnb));
  }
}

// ---------------------------------------------------------------------------
// UE placement and mobility

std::vector<UeMobilityState> spawn_ues(std::span<const Corridor> corridors, int count,
                                       std::uint64_t seed, double speed_mps, double height_m) {
  std::vector<double> cumulative;
  cumulative.reserve(corridors.size());
  double total = 0.0;
  for (const Corridor& c : corridors) {
    total += std::max(c.rect.area(), 0.0);
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw ConfigError("no sidewalk area to place UEs on");

  std::vector<UeMobilityState> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    RngStream rng(seed, RngPurpose::spawn, static_cast<std::uint64_t>(i));
    const double pick = rng.uniform() * total;
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
    k = std::min(k, corridors.size() - 1);
    // Skip zero-area strips that share a cumulative value with their neighbour.
    while (corridors[k].rect.area() <= 0.0 && k + 1 < corridors.size()) ++k;
    const Corridor& c = corridors[k];
    UeMobilityState s;
    s.position = {rng.uniform(c.rect.x0, c.rect.x1), rng.uniform(c.rect.y0, c.rect.y1)};
    const bool forward = rng.uniform() < 0.5;
    if (c.horizontal())
      s.heading = forward ? Heading::east : Heading::west;
    else
      s.heading = forward ? Heading::north : Heading::south;
    s.speed_mps = speed_mps;
    s.height_m = height_m;
    out.push_back(s);
  }
  return out;
}

std::vector<UeMobilityState> spawn_ues(const ScenarioConfig& cfg, std::uint64_t seed) {
  const auto corridors = cfg.layout.sidewalk_corridors();
  return spawn_ues(corridors, cfg.ue_count, seed, cfg.ue_speed_mps, cfg.ue_height_m);
}

std::array<double, 3> turn_probabilities(TurnMask mask) {
  std::array<double, 3> p{mask.straight ? 0.6 : 0.0, mask.left ? 0.2 : 0.0, mask.right ? 0.2 : 0.0};
  const double sum = p[0] + p[1] + p[2];
  if (sum > 0.0)
    for (double& v : p) v /= sum;
  return p;
}

Turn draw_turn(TurnMask mask, double u) {
  const auto p = turn_probabilities(mask);
  if (u < p[0]) return Turn::straight;
  if (u < p[0] + p[1]) return Turn::left;
  if (mask.right) return Turn::right;
  return mask.left ? Turn::left : Turn::straight;
}

TurnMask available_turns(const GridLayout& layout, Vec2 corner, Heading heading) {
  const auto rc = layout.ring_of(corner);
  const Vec2 centre = layout.block(rc[0], rc[1]).center();
  const Vec2 left = heading_vector(turned_left(heading));
  const double toward = left.x * (centre.x - corner.x) + left.y * (centre.y - corner.y);
  return {false, toward > 0.0, toward <= 0.0};
}

UeMobilityState step_ue(const UeMobilityState& state, double dt_s, const GridLayout& layout,
                        RngStream& rng) {
  UeMobilityState s = state;
  double remaining = s.speed_mps * dt_s;
  // A side is at least one block long, so one step meets at most one corner;
  // the bound only guards against degenerate input.
  for (int guard = 0; guard < 8 && remaining > 0.0; ++guard) {
    const auto rc = layout.ring_of(s.position);
    const Rect b = layout.block(rc[0], rc[1]);
    Vec2& p = s.position;
    double dist = 0.0;
    Vec2 corner = p;
    switch (s.heading) {
      case Heading::east:
      case Heading::west: {
        const double d = p.y > b.y1 ? p.y - b.y1 : b.y0 - p.y;
        corner.x = s.heading == Heading::east ? b.x1 + d : b.x0 - d;
        dist = s.heading == Heading::east ? corner.x - p.x : p.x - corner.x;
        break;
      }
      case Heading::north:
      case Heading::south: {
        const double d = p.x > b.x1 ? p.x - b.x1 : b.x0 - p.x;
        corner.y = s.heading == Heading::north ? b.y1 + d : b.y0 - d;
        dist = s.heading == Heading::north ? corner.y - p.y : p.y - corner.y;
        break;
      }
    }
    if (dist > remaining) {
      const Vec2 v = heading_vector(s.heading);
      p.x += v.x * remaining;
      p.y += v.y * remaining;
      remaining = 0.0;
      break;
    }
    if (dist >= 0.0) {
      p = corner;
      remaining -= dist;
    }
    const TurnMask mask = available_turns(layout, p, s.heading);
    switch (draw_turn(mask, rng.uniform())) {
      case Turn::straight: break;
      case Turn::left: s.heading = turned_left(s.heading); break;
      case Turn::right: s.heading = turned_right(s.heading); break;
    }
  }
  return s;
}

}  // namespace ncrsim
