#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ncrsim/common.hpp"

namespace ncrsim {

struct RadioParams {
  double gnb_tx_dbm = 35.0;
  double ue_tx_dbm = 24.0;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 9.0;
  int rb_count = 66;
  double rb_bandwidth_hz = 720e3;
  int subcarriers_per_rb = 12;
  int symbols_per_slot = 14;
  double ncr_gain_db = 90.0;
  double ncr_max_output_dbm = 33.0;

  double gnb_rb_dbm() const;
  double gnb_re_dbm() const;
  /// UEs transmit at a fixed spectral density: the full power spread over
  /// the whole carrier, whatever the allocation size.
  double ue_rb_dbm() const;
  double rb_noise_dbm() const;
  double carrier_noise_dbm() const;
};

struct McsEntry {
  double min_sinr_db;
  double spectral_efficiency;
};

class McsTable {
 public:
  explicit McsTable(std::vector<McsEntry> entries);
  /// 16 NR-style entries with a 3 dB Shannon gap.
  static McsTable standard();

  int size() const { return static_cast<int>(entries_.size()); }
  double threshold_db(int mcs) const { return entries_.at(mcs).min_sinr_db; }
  double efficiency(int mcs) const { return entries_.at(mcs).spectral_efficiency; }

 private:
  std::vector<McsEntry> entries_;
};

inline constexpr int kOutage = -1;

/// Largest index whose threshold is <= sinr_db, or kOutage.
int select_mcs(const McsTable& table, double sinr_db);

/// floor(efficiency * n_rb * subcarriers * symbols); 0 for outage or no RBs.
std::int64_t tb_bits(const McsTable& table, int mcs, int n_rb, int subcarriers_per_rb = 12,
                     int symbols_per_slot = 14);

double rsrp_direct_dbm(double per_re_dbm, double gain_db);
double rsrp_forwarded_dbm(double per_re_dbm, double backhaul_gain_db, double ncr_gain_db,
                          double access_gain_db);

enum class LinkType { direct, forwarded };

inline const char* to_string(LinkType t) { return t == LinkType::direct ? "direct" : "forwarded"; }

/// RB-averaged received powers in mW.
struct SinrComponents {
  double signal = 0.0;
  double ncr_noise = 0.0;
  double rx_noise = 0.0;
  double direct_interf = 0.0;
  double fwd_interf = 0.0;
  double fwd_noise_interf = 0.0;

  double impairment() const {
    return ncr_noise + rx_noise + direct_interf + fwd_interf + fwd_noise_interf;
  }
  double sinr_lin() const { return signal / impairment(); }
  double sinr_db() const { return lin_to_db(sinr_lin()); }
};

struct UeGrant {
  int ue = 0;
  int gnb = 0;
  int ncr = -1;  // serving repeater, -1 when served directly
  int rb_start = 0;
  int rb_len = 0;
  double tx_rb_mw = 0.0;  // UL transmit power per RB

  LinkType link_type() const { return ncr < 0 ? LinkType::direct : LinkType::forwarded; }
};

/// Allocations of every gNB in one slot.
struct SlotAllocation {
  Direction dir = Direction::dl;
  int rb_count = 0;
  std::vector<UeGrant> grants;
  std::vector<std::vector<int>> owner;  // [gnb][rb] -> grant index or -1

  SlotAllocation() = default;
  SlotAllocation(Direction d, int gnbs, int rbs) : dir(d), rb_count(rbs), owner(gnbs, std::vector<int>(rbs, -1)) {}
  int gnb_count() const { return static_cast<int>(owner.size()); }
  /// Adds a grant and marks its RBs; throws SimError on a collision.
  int add(const UeGrant& g);
};

/// Linear channel gains in the current slot, beams included.
class GainView {
 public:
  virtual ~GainView() = default;
  /// gNB g using the beam of whatever it schedules on `rb`, to or from UE u.
  virtual double gnb_ue(int g, int u, int rb) const = 0;
  /// Repeater n's UE-side panel with its active access beam, to or from UE u.
  virtual double ncr_ue(int n, int u, int rb) const = 0;
  /// gNB g (beam on `rb`) to or from repeater n's gNB-side panel (backhaul beam).
  virtual double gnb_ncr(int g, int n, int rb) const = 0;
};

struct NcrSlot {
  bool on = false;
  double input_dbm = kFloorDb;
  double gain_db = 0.0;
  double gain_lin = 0.0;
  double noise_out_rb_mw = 0.0;  // amplified receiver noise per RB at the output panel
  int controller = -1;
};

/// Frozen per-slot state shared by all SINR evaluations of the slot.
struct SlotContext {
  const SlotAllocation* alloc = nullptr;
  const GainView* view = nullptr;
  RadioParams params;
  double gnb_rb_mw = 0.0;
  double rb_noise_mw = 0.0;
  int ncr_count = 0;
  std::vector<NcrSlot> ncrs;
  /// Per-RB power entering repeater n from cell g's transmission on RB r,
  /// indexed (n * gnbs + g) * rbs + r.
  std::vector<double> ncr_input;

  double input(int n, int g, int r) const {
    return ncr_input[(static_cast<std::size_t>(n) * alloc->gnb_count() + g) * alloc->rb_count + r];
  }
};

/// Computes repeater inputs, capped gains and noise for the slot. `ncr_on`
/// has one flag per repeater; OFF repeaters get no entries. `controller`
/// gives each repeater's gNB; empty means every repeater is a neighbor of
/// every cell.
SlotContext prepare_slot(const SlotAllocation& alloc, const GainView& view, const RadioParams& params,
                         std::span<const char> ncr_on, std::span<const int> controller = {});

SinrComponents sinr_dl(const SlotContext& ctx, const UeGrant& grant);
SinrComponents sinr_ul(const SlotContext& ctx, const UeGrant& grant);
inline SinrComponents sinr(const SlotContext& ctx, const UeGrant& grant) {
  return ctx.alloc->dir == Direction::dl ? sinr_dl(ctx, grant) : sinr_ul(ctx, grant);
}

}  // namespace ncrsim
