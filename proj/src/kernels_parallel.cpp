#include <cmath>
#include <exception>
#include <mutex>

#include "kernel_bodies.hpp"

namespace tdqmc::kernels::parallel {

namespace {

// Exceptions must not escape an OpenMP region; keep the first and rethrow.
class FirstError {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace

void direct_rows(const DirectRowsArgs& args, std::span<double> rows) {
  const std::size_t G = args.grid->size();
  const std::size_t M = args.partners.size();
  std::vector<double> vee(M * G);
#pragma omp parallel for schedule(static)
  for (std::size_t l = 0; l < M; ++l) detail::vee_row(args, l, vee.data() + l * G);
  if (std::isinf(args.sigma)) {
    detail::mean_field_row(args, vee, rows.data());
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < M; ++k) detail::direct_row(args, vee, k, rows.data() + k * G);
}

void gridded_table(const GriddedTableArgs& args, std::span<double> table, std::span<double> z) {
  const std::size_t G = args.grid->size();
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t c = 0; c < G; ++c)
    if (args.needed[c]) detail::table_row(args, c, table.data() + c * G, z[c]);
}

void step_waves(const WaveStepArgs& args) {
  FirstError errors;
#pragma omp parallel for schedule(static)
  for (std::size_t w = 0; w < args.count; ++w) errors.run([&] { detail::wave_step(args, w); });
  errors.rethrow();
}

void gram(std::span<const double> waves, std::size_t count, double cell_volume,
          std::span<double> out) {
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t k = 0; k < count; ++k) detail::gram_row(waves, count, cell_volume, k, out);
  detail::mirror(count, out);
}

GramMoments gram_moments(std::span<const double> waves, std::size_t count, double cell_volume) {
  std::vector<double> partial(count), diag(count);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t k = 0; k < count; ++k)
    detail::moments_row(waves, count, cell_volume, k, partial.data(), diag.data());
  return detail::reduce_moments(partial, diag);
}

}  // namespace tdqmc::kernels::parallel
