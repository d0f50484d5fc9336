#include "d2dcache/popularity.hpp"

#include <cmath>
#include <stdexcept>

namespace d2dcache {

PopularityModel::PopularityModel(long library_size, double sigma, long cached_files)
    : z_(library_size), sigma_(sigma), f_(cached_files) {
  if (z_ < 1) throw std::invalid_argument("library size must be >= 1");
  if (sigma_ < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (f_ < 0 || f_ > z_) throw std::invalid_argument("cached file count must be in [0, Z]");
  // Sum smallest terms first.
  norm_ = 0.0;
  for (long j = z_; j >= 1; --j) norm_ += std::pow(static_cast<double>(j), -sigma_);
  double top = 0.0;
  for (long j = f_; j >= 1; --j) top += std::pow(static_cast<double>(j), -sigma_);
  hit_ = f_ == z_ ? 1.0 : top / norm_;
}

double PopularityModel::zipf_pmf(long rank) const {
  if (rank < 1 || rank > z_) throw std::out_of_range("zipf rank out of range");
  return std::pow(static_cast<double>(rank), -sigma_) / norm_;
}

}  // namespace d2dcache
