#include "tdqmc/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <stdexcept>

namespace tdqmc {

namespace {

// The FFTW planner is not re-entrant; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

std::vector<std::complex<double>>& spectral_scratch(std::size_t n) {
  thread_local std::vector<std::complex<double>> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

std::vector<double>& real_scratch(std::size_t n) {
  thread_local std::vector<double> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  PlanPair(const std::vector<int>& shape, std::size_t size, std::size_t spectral) {
    std::vector<double> in(size);
    std::vector<std::complex<double>> out(spectral);
    auto* cout = reinterpret_cast<fftw_complex*>(out.data());
    std::lock_guard lock(planner_mutex());
    const int rank = static_cast<int>(shape.size());
    forward = fftw_plan_dft_r2c(rank, shape.data(), in.data(), cout, kPlanFlags);
    backward = fftw_plan_dft_c2r(rank, shape.data(), cout, in.data(), kPlanFlags);
    if (!forward || !backward) throw std::runtime_error("FFTW planning failed");
  }
  ~PlanPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

std::size_t spectral_count(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (std::size_t a = 0; a + 1 < shape.size(); ++a) n *= static_cast<std::size_t>(shape[a]);
  return n * static_cast<std::size_t>(shape.back() / 2 + 1);
}

}  // namespace

struct SpectralKinetic::Plans : PlanPair {
  using PlanPair::PlanPair;
};

SpectralKinetic::SpectralKinetic(std::vector<int> shape, std::vector<double> extents)
    : shape_(std::move(shape)) {
  if (shape_.empty() || shape_.size() != extents.size())
    throw std::invalid_argument("spectral shape and extents must have the same rank");
  size_ = 1;
  for (int n : shape_) size_ *= static_cast<std::size_t>(n);
  spectral_size_ = spectral_count(shape_);

  // k²/2 on the half spectrum, last axis truncated to n/2+1 entries
  half_k2_.assign(spectral_size_, 0.0);
  const std::size_t rank = shape_.size();
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t f = 0; f < spectral_size_; ++f) {
    double k2 = 0.0;
    for (std::size_t a = 0; a < rank; ++a) {
      const int n = shape_[a];
      const int i = static_cast<int>(idx[a]);
      const int m = i <= n / 2 ? i : i - n;
      const double k = 2.0 * std::numbers::pi * m / extents[a];
      k2 += k * k;
    }
    half_k2_[f] = 0.5 * k2;
    for (std::size_t a = rank; a-- > 0;) {
      const std::size_t lim = a + 1 == rank ? static_cast<std::size_t>(shape_[a] / 2 + 1)
                                            : static_cast<std::size_t>(shape_[a]);
      if (++idx[a] < lim) break;
      idx[a] = 0;
    }
  }
  plans_ = std::make_unique<Plans>(shape_, size_, spectral_size_);
}

namespace {
std::vector<int> grid_shape(const Grid& grid, int particles) {
  return std::vector<int>(static_cast<std::size_t>(grid.dim() * particles), grid.points_per_axis());
}
std::vector<double> grid_extents(const Grid& grid, int particles) {
  return std::vector<double>(static_cast<std::size_t>(grid.dim() * particles), grid.extent());
}
}  // namespace

SpectralKinetic::SpectralKinetic(const Grid& grid) : SpectralKinetic(grid, 1) {}

SpectralKinetic::SpectralKinetic(const Grid& grid, int particles)
    : SpectralKinetic(grid_shape(grid, particles), grid_extents(grid, particles)) {}

SpectralKinetic::~SpectralKinetic() = default;

void SpectralKinetic::transform_multiply(std::span<const double> in, std::span<double> out,
                                         std::span<const double> factor) const {
  if (in.size() != size_ || out.size() != size_)
    throw std::invalid_argument("spectral operator size mismatch");
  auto& spec = spectral_scratch(spectral_size_);
  auto& tmp = real_scratch(size_);
  std::copy(in.begin(), in.end(), tmp.begin());
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_execute_dft_r2c(plans_->forward, tmp.data(), c);
  const double inv = 1.0 / static_cast<double>(size_);
  for (std::size_t f = 0; f < spectral_size_; ++f) spec[f] *= factor[f] * inv;
  fftw_execute_dft_c2r(plans_->backward, c, tmp.data());
  std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(size_), out.begin());
}

std::vector<double> SpectralKinetic::propagator_factor(double dtau) const {
  std::vector<double> factor(spectral_size_);
  for (std::size_t f = 0; f < spectral_size_; ++f) factor[f] = std::exp(-dtau * half_k2_[f]);
  return factor;
}

void SpectralKinetic::propagate(std::span<double> wave, std::span<const double> factor) const {
  if (factor.size() != spectral_size_) throw std::invalid_argument("propagator factor size mismatch");
  transform_multiply(wave, wave, factor);
}

void SpectralKinetic::propagate(std::span<double> wave, double dtau) const {
  propagate(wave, propagator_factor(dtau));
}

void SpectralKinetic::apply(std::span<const double> in, std::span<double> out) const {
  transform_multiply(in, out, half_k2_);
}

double SpectralKinetic::expectation(std::span<const double> in) const {
  std::vector<double> t(size_);
  transform_multiply(in, t, half_k2_);
  double acc = 0.0;
  for (std::size_t i = 0; i < size_; ++i) acc += in[i] * t[i];
  return acc;
}

struct PeriodicConvolution::Plans : PlanPair {
  using PlanPair::PlanPair;
};

PeriodicConvolution::PeriodicConvolution(const Grid& grid) : grid_(grid) {
  const auto shape = grid_shape(grid, 1);
  spectral_size_ = spectral_count(shape);
  plans_ = std::make_unique<Plans>(shape, grid.size(), spectral_size_);
}

PeriodicConvolution::~PeriodicConvolution() = default;

Position PeriodicConvolution::offset(std::size_t flat) const {
  const int n = grid_.points_per_axis();
  const double h = grid_.spacing();
  auto wrap_index = [n](int i) { return i <= n / 2 ? i : i - n; };
  if (grid_.dim() == 1) return {wrap_index(static_cast<int>(flat)) * h, 0.0};
  return {wrap_index(static_cast<int>(flat / n)) * h, wrap_index(static_cast<int>(flat % n)) * h};
}

void PeriodicConvolution::set_kernel(const std::vector<double>& kernel) {
  kernel_hat_.resize(spectral_size_);
  std::vector<double> tmp(kernel);
  fftw_execute_dft_r2c(plans_->forward, tmp.data(),
                       reinterpret_cast<fftw_complex*>(kernel_hat_.data()));
}

void PeriodicConvolution::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (in.size() != n || out.size() != n) throw std::invalid_argument("convolution size mismatch");
  auto& spec = spectral_scratch(spectral_size_);
  auto& tmp = real_scratch(n);
  std::copy(in.begin(), in.end(), tmp.begin());
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_execute_dft_r2c(plans_->forward, tmp.data(), c);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t f = 0; f < spectral_size_; ++f) spec[f] *= kernel_hat_[f] * inv;
  fftw_execute_dft_c2r(plans_->backward, c, tmp.data());
  std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(n), out.begin());
}

}  // namespace tdqmc
