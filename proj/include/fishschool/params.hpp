#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fishschool {

/// Raised when a parameter, configuration value or precondition is out of range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rescaled constants of the interaction kernels.
struct DerivedConstants {
  double alpha1 = 0.0;  // alpha * r^p
  double beta1 = 0.0;   // beta * r^p
  double gamma = 0.0;   // r^(q-p)

  bool operator==(const DerivedConstants&) const = default;
};

/// Returns (alpha r^p, beta r^p, r^(q-p)). Throws InvalidParameter unless
/// alpha, beta, r > 0 and 1 < p < q < inf.
DerivedConstants derive_params(double alpha, double beta, double r, double p, double q);

/// Interaction constants as they appear in the unscaled model.
struct Interaction {
  double alpha = 1.0;
  double beta = 0.5;
  double r = 1.0;
  double p = 3.0;
  double q = 4.0;

  bool operator==(const Interaction&) const = default;
};

/// Full parameter set of the N-particle model. Immutable after construction;
/// the derived constants are always consistent with the physical ones.
class ModelParams {
 public:
  /// One noise amplitude per particle; n_particles = sigma.size().
  ModelParams(Interaction interaction, std::size_t dim, std::vector<double> sigma);
  /// Same noise amplitude for all particles.
  ModelParams(Interaction interaction, std::size_t dim, std::size_t n_particles, double sigma);

  const Interaction& interaction() const { return interaction_; }
  double alpha() const { return interaction_.alpha; }
  double beta() const { return interaction_.beta; }
  double r() const { return interaction_.r; }
  double p() const { return interaction_.p; }
  double q() const { return interaction_.q; }

  double alpha1() const { return derived_.alpha1; }
  double beta1() const { return derived_.beta1; }
  double gamma() const { return derived_.gamma; }
  const DerivedConstants& derived() const { return derived_; }

  std::size_t n_particles() const { return sigma_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> sigma() const { return sigma_; }
  double sigma(std::size_t i) const { return sigma_[i]; }

  /// True when every sigma_i is zero.
  bool is_deterministic() const;

  bool operator==(const ModelParams&) const = default;

 private:
  Interaction interaction_;
  std::size_t dim_;
  std::vector<double> sigma_;
  DerivedConstants derived_;
};

}  // namespace fishschool
