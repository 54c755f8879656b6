#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncrsim/common.hpp"

namespace ncrsim {

enum class SciKind { periodic, semi_persistent, dynamic };

const char* to_string(SciKind k);
SciKind parse_sci_kind(const std::string& s);

struct SciEntry {
  std::int64_t offset = 0;
  std::int64_t duration = 1;
  int beam = 0;
};

/// Side control information for the forwarding part of one repeater.
///
/// Periodic and semi-persistent entries repeat every `periodicity_slots`
/// starting at slot 0. Dynamic entries are anchored at `anchor_slot` and apply
/// once.
struct SideControlInfo {
  SciKind kind = SciKind::periodic;
  std::int64_t periodicity_slots = 1;
  std::int64_t anchor_slot = 0;
  std::vector<SciEntry> entries;
};

/// Throws ConfigError if entries overlap, have durations below one slot, or
/// leave the period (periodic kinds).
void validate_sci(const SideControlInfo& sci, int beam_count);

enum class Panel { gnb_side, ue_side };

struct BeamIndication {
  int access_beam = 0;
  int backhaul_beam = 0;
  Direction direction = Direction::dl;
  /// Panel that receives in this slot (gNB side in DL, UE side in UL).
  Panel rx_panel = Panel::gnb_side;
};

struct ForwardResult {
  double effective_gain_db = 0.0;
  double output_power_dbm = 0.0;
};

/// min(max_gain, max_output - input) and the resulting output power.
ForwardResult capped_gain(double input_power_dbm, double max_gain_db, double max_output_dbm);

class NcrState {
 public:
  explicit NcrState(double amp_gain_db = 90.0, double max_output_dbm = 33.0, int beam_count = 64)
      : amp_gain_db_(amp_gain_db), max_output_dbm_(max_output_dbm), beam_count_(beam_count) {}

  double amp_gain_db() const { return amp_gain_db_; }
  double max_output_dbm() const { return max_output_dbm_; }
  int beam_count() const { return beam_count_; }

  int backhaul_beam() const { return backhaul_beam_; }
  /// The backhaul beam is fixed; only an explicit update changes it.
  void set_backhaul_beam(int beam);

  /// Access beam scheduled for `slot`, if any. Dynamic entries take precedence
  /// over semi-persistent ones, which take precedence over periodic ones.
  std::optional<int> access_beam(std::int64_t slot) const;

  /// Moves the state to `slot` and latches ON/OFF for it.
  void set_slot(std::int64_t slot);
  std::int64_t slot() const { return slot_; }
  bool on() const { return current_beam_.has_value(); }
  std::optional<int> current_access_beam() const { return current_beam_; }

  /// Gain actually applied in the current slot (after the output cap).
  double effective_gain_db() const { return effective_gain_db_; }
  void set_effective_gain_db(double g) { effective_gain_db_ = g; }

  const std::optional<SideControlInfo>& layer(SciKind k) const { return layers_[static_cast<int>(k)]; }

 private:
  friend NcrState apply_sci(const NcrState&, const SideControlInfo&);

  double amp_gain_db_;
  double max_output_dbm_;
  int beam_count_;
  int backhaul_beam_ = 0;
  std::optional<SideControlInfo> layers_[3];
  std::int64_t slot_ = -1;
  std::optional<int> current_beam_;
  double effective_gain_db_ = 90.0;
};

/// Replaces the layer of the SCI's kind. An SCI without entries clears the
/// layer. Invalid SCI throws ConfigError and leaves `state` untouched.
NcrState apply_sci(const NcrState& state, const SideControlInfo& sci);

/// Errors with SimError when the repeater is OFF in its current slot.
ForwardResult forward_gain_db(const NcrState& state, double input_power_dbm);

/// Thermal noise of the repeater's receiver, amplified by the current
/// effective gain, at the output panel.
double amplified_noise_dbm(const NcrState& state, double noise_figure_db, double bandwidth_hz);

double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db);

/// Beams and direction for `slot`, or nothing when the repeater is OFF.
std::optional<BeamIndication> mt_beam_indication(const NcrState& state, std::int64_t slot);

}  // namespace ncrsim
