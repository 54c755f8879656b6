#include "ncrsim/ncr.hpp"

#include <algorithm>
#include <cmath>

#include "ncrsim/mac.hpp"

namespace ncrsim {

const char* to_string(SciKind k) {
  switch (k) {
    case SciKind::periodic: return "periodic";
    case SciKind::semi_persistent: return "semi_persistent";
    case SciKind::dynamic: return "dynamic";
  }
  return "?";
}

SciKind parse_sci_kind(const std::string& s) {
  if (s == "periodic") return SciKind::periodic;
  if (s == "semi_persistent" || s == "semi-persistent") return SciKind::semi_persistent;
  if (s == "dynamic") return SciKind::dynamic;
  throw ConfigError("unknown SCI kind '" + s + "'");
}

void validate_sci(const SideControlInfo& sci, int beam_count) {
  const bool periodic = sci.kind != SciKind::dynamic;
  if (periodic && sci.periodicity_slots < 1) throw ConfigError("SCI periodicity must be >= 1 slot");
  std::vector<std::pair<std::int64_t, std::int64_t>> spans;
  for (const SciEntry& e : sci.entries) {
    if (e.duration < 1) throw ConfigError("SCI entry duration must be >= 1 slot");
    if (e.offset < 0) throw ConfigError("SCI entry offset must be >= 0");
    if (e.beam < 0 || e.beam >= beam_count)
      throw ConfigError("SCI beam " + std::to_string(e.beam) + " outside the codebook");
    if (periodic && e.offset + e.duration > sci.periodicity_slots)
      throw ConfigError("SCI entry exceeds its periodicity");
    spans.emplace_back(e.offset, e.offset + e.duration);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i)
    if (spans[i].first < spans[i - 1].second)
      throw ConfigError("SCI entries overlap at slot " + std::to_string(spans[i].first));
}

ForwardResult capped_gain(double input_power_dbm, double max_gain_db, double max_output_dbm) {
  const double candidate = input_power_dbm + max_gain_db;
  if (candidate <= max_output_dbm) return {max_gain_db, candidate};
  return {max_output_dbm - input_power_dbm, max_output_dbm};
}

void NcrState::set_backhaul_beam(int beam) {
  if (beam < 0 || beam >= beam_count_) throw ConfigError("backhaul beam outside the codebook");
  backhaul_beam_ = beam;
}

namespace {

std::optional<int> lookup(const SideControlInfo& sci, std::int64_t slot) {
  std::int64_t rel = 0;
  if (sci.kind == SciKind::dynamic) {
    rel = slot - sci.anchor_slot;
    if (rel < 0) return std::nullopt;
  } else {
    rel = slot % sci.periodicity_slots;
  }
  for (const SciEntry& e : sci.entries)
    if (rel >= e.offset && rel < e.offset + e.duration) return e.beam;
  return std::nullopt;
}

}  // namespace

std::optional<int> NcrState::access_beam(std::int64_t slot) const {
  for (SciKind k : {SciKind::dynamic, SciKind::semi_persistent, SciKind::periodic}) {
    const auto& l = layers_[static_cast<int>(k)];
    if (!l) continue;
    if (auto b = lookup(*l, slot)) return b;
  }
  return std::nullopt;
}

void NcrState::set_slot(std::int64_t slot) {
  slot_ = slot;
  current_beam_ = access_beam(slot);
  effective_gain_db_ = amp_gain_db_;
}

NcrState apply_sci(const NcrState& state, const SideControlInfo& sci) {
  validate_sci(sci, state.beam_count_);
  NcrState next = state;
  auto& layer = next.layers_[static_cast<int>(sci.kind)];
  if (sci.entries.empty())
    layer.reset();
  else
    layer = sci;
  if (next.slot_ >= 0) next.current_beam_ = next.access_beam(next.slot_);
  return next;
}

ForwardResult forward_gain_db(const NcrState& state, double input_power_dbm) {
  if (!state.on()) throw SimError("forward_gain_db called for a repeater that is OFF");
  return capped_gain(input_power_dbm, state.amp_gain_db(), state.max_output_dbm());
}

double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double amplified_noise_dbm(const NcrState& state, double noise_figure_db, double bandwidth_hz) {
  if (!state.on()) throw SimError("amplified_noise_dbm called for a repeater that is OFF");
  return thermal_noise_dbm(bandwidth_hz, noise_figure_db) + state.effective_gain_db();
}

std::optional<BeamIndication> mt_beam_indication(const NcrState& state, std::int64_t slot) {
  const auto beam = state.access_beam(slot);
  if (!beam) return std::nullopt;
  BeamIndication ind;
  ind.access_beam = *beam;
  ind.backhaul_beam = state.backhaul_beam();
  ind.direction = tdd_direction(slot);
  ind.rx_panel = ind.direction == Direction::dl ? Panel::gnb_side : Panel::ue_side;
  return ind;
}

}  // namespace ncrsim
