#pragma once

#include <span>

#include "ncrsim/phy.hpp"

namespace ncrsim {

/// SINR of every grant in the slot, in grant order.
void sinr_batch_serial(const SlotContext& ctx, std::span<SinrComponents> out);

/// Same result as the serial version, bit for bit: each grant is evaluated
/// independently with the same summation order, only spread over threads.
void sinr_batch_omp(const SlotContext& ctx, std::span<SinrComponents> out);

/// Thread count from NCR_SIM_THREADS, if set and valid; 0 otherwise.
int threads_from_env();
void set_worker_threads(int n);

}  // namespace ncrsim
