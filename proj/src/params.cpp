#include "fishschool/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fishschool {

DerivedConstants derive_params(double alpha, double beta, double r, double p, double q) {
  auto fail = [&](const char* what) {
    std::ostringstream os;
    os << "invalid model parameters (" << what << "): alpha=" << alpha << " beta=" << beta
       << " r=" << r << " p=" << p << " q=" << q;
    throw InvalidParameter(os.str());
  };
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive");
  if (!(r > 0.0) || !std::isfinite(r)) fail("r must be positive");
  if (!(p > 1.0 && p < q && std::isfinite(q))) fail("need 1 < p < q < inf");

  const double rp = std::pow(r, p);
  return {alpha * rp, beta * rp, std::pow(r, q - p)};
}

ModelParams::ModelParams(Interaction interaction, std::size_t dim, std::vector<double> sigma)
    : interaction_(interaction),
      dim_(dim),
      sigma_(std::move(sigma)),
      derived_(derive_params(interaction.alpha, interaction.beta, interaction.r, interaction.p,
                             interaction.q)) {
  if (dim_ < 1) throw InvalidParameter("dimension must be >= 1");
  if (sigma_.empty()) throw InvalidParameter("need at least one particle");
  for (double s : sigma_) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InvalidParameter("noise amplitudes must be finite and >= 0");
    }
  }
}

ModelParams::ModelParams(Interaction interaction, std::size_t dim, std::size_t n_particles,
                         double sigma)
    : ModelParams(interaction, dim, std::vector<double>(n_particles, sigma)) {}

bool ModelParams::is_deterministic() const {
  return std::all_of(sigma_.begin(), sigma_.end(), [](double s) { return s == 0.0; });
}

}  // namespace fishschool
