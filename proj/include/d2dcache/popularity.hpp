#pragma once

namespace d2dcache {

/// Zipf popularity over a library of Z files, with the F most popular ones
/// cached. Immutable after construction.
class PopularityModel {
 public:
  PopularityModel() : PopularityModel(1, 0.0, 1) {}
  PopularityModel(long library_size, double sigma, long cached_files);

  /// z_i = i^-sigma / sum_j j^-sigma, 1 <= i <= Z.
  double zipf_pmf(long rank) const;

  /// Pr{H=1} = sum of the F most popular files' probabilities.
  double hit_probability() const { return hit_; }

  long library_size() const { return z_; }
  double sigma() const { return sigma_; }
  long cached_files() const { return f_; }

  bool operator==(const PopularityModel& o) const {
    return z_ == o.z_ && sigma_ == o.sigma_ && f_ == o.f_;
  }

 private:
  long z_;
  double sigma_;
  long f_;
  double norm_;
  double hit_;
};

}  // namespace d2dcache
