#include "ncrsim/kernels.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace ncrsim {

void sinr_batch_serial(const SlotContext& ctx, std::span<SinrComponents> out) {
  const auto& grants = ctx.alloc->grants;
  for (std::size_t i = 0; i < grants.size(); ++i) out[i] = sinr(ctx, grants[i]);
}

void sinr_batch_omp(const SlotContext& ctx, std::span<SinrComponents> out) {
  const auto& grants = ctx.alloc->grants;
  const long n = static_cast<long>(grants.size());
#pragma omp parallel for schedule(static) if (n > 4)
  for (long i = 0; i < n; ++i) out[i] = sinr(ctx, grants[i]);
}

int threads_from_env() {
  const char* v = std::getenv("NCR_SIM_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  try {
    const int n = std::stoi(v);
    return n > 0 ? n : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

void set_worker_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace ncrsim
