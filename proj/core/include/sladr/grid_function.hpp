#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sladr {

/// Dof values for S species, stored interleaved: values[i * S + s].
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::size_t n_dofs, std::size_t n_species, double fill = 0.0)
      : n_dofs_(n_dofs), n_species_(n_species), values_(n_dofs * n_species, fill) {}

  std::size_t n_dofs() const { return n_dofs_; }
  std::size_t n_species() const { return n_species_; }

  double& operator()(std::size_t dof, std::size_t s) { return values_[dof * n_species_ + s]; }
  double operator()(std::size_t dof, std::size_t s) const { return values_[dof * n_species_ + s]; }

  std::span<double> at(std::size_t dof) { return {values_.data() + dof * n_species_, n_species_}; }
  std::span<const double> at(std::size_t dof) const {
    return {values_.data() + dof * n_species_, n_species_};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Values of one species in dof order.
  std::vector<double> species(std::size_t s) const {
    std::vector<double> out(n_dofs_);
    for (std::size_t i = 0; i < n_dofs_; ++i) out[i] = (*this)(i, s);
    return out;
  }

  bool all_finite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  std::size_t n_dofs_ = 0;
  std::size_t n_species_ = 1;
  std::vector<double> values_;
};

}  // namespace sladr
