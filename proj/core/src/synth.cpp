#include "evsefl/synth.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "evsefl/errors.hpp"
#include "evsefl/rng.hpp"

namespace evsefl {

namespace {

// Two orthonormal dense directions in R^dim via Gram-Schmidt on seeded
// Gaussian draws.
std::pair<std::vector<double>, std::vector<double>> orthonormal_pair(
    Rng& rng, std::size_t dim) {
  std::vector<double> u(dim), w(dim);
  for (std::size_t j = 0; j < dim; ++j) u[j] = rng.normal();
  for (std::size_t j = 0; j < dim; ++j) w[j] = rng.normal();
  double norm_u = 0.0;
  for (double x : u) norm_u += x * x;
  norm_u = std::sqrt(norm_u);
  for (double& x : u) x /= norm_u;
  double dot = 0.0;
  for (std::size_t j = 0; j < dim; ++j) dot += u[j] * w[j];
  for (std::size_t j = 0; j < dim; ++j) w[j] -= dot * u[j];
  double norm_w = 0.0;
  for (double x : w) norm_w += x * x;
  norm_w = std::sqrt(norm_w);
  for (double& x : w) x /= norm_w;
  return {std::move(u), std::move(w)};
}

}  // namespace

PairedDataset synth_generate(const SynthSpec& spec) {
  if (spec.n_per_class < 10) {
    std::ostringstream msg;
    msg << "synth_generate needs n_per_class >= 10, got " << spec.n_per_class;
    throw DataError(msg.str());
  }
  if (spec.d1 < 2 || spec.d2 < 2)
    throw DataError("synth_generate needs at least 2 features per modality");

  Rng dir_rng(derive_seed(spec.seed, 0x64697273ULL));
  const auto [u_net, w_net] = orthonormal_pair(dir_rng, spec.d1);
  const auto [u_kernel, w_kernel] = orthonormal_pair(dir_rng, spec.d2);

  const std::size_t total = spec.n_per_class * kNumClasses;
  PairedDataset out;
  out.pairing_seed = spec.seed;
  out.net_features = Tensor({total, spec.d1});
  out.kernel_features = Tensor({total, spec.d2});
  out.labels.resize(total);

  Rng noise_rng(derive_seed(spec.seed, 0x6e6f697365ULL));
  Rng sign_rng(derive_seed(spec.seed, 0x7369676eULL));

  std::size_t row = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < spec.n_per_class; ++i, ++row) {
      out.labels[row] = c;

      double net_u = 0.0, net_w = 0.0, kernel_u = 0.0, kernel_w = 0.0;
      if (spec.coupling == SynthCoupling::Independent) {
        const double axis = c == 0 ? -kSynthSignal : (c == 1 ? kSynthSignal : 0.0);
        net_u = kernel_u = axis;
        if (c == 2) net_w = kernel_w = kSynthSignal;
      } else {
        if (c == 2) {
          net_w = kernel_w = kSynthSignal;
        } else {
          const double r = sign_rng.uniform() < 0.5 ? -1.0 : 1.0;
          net_u = kSynthSignal * r;
          kernel_u = c == 0 ? kSynthSignal * r : -kSynthSignal * r;
        }
      }

      for (std::size_t j = 0; j < spec.d1; ++j) {
        out.net_features.at(row, j) = net_u * u_net[j] + net_w * w_net[j] +
                                      noise_rng.normal(0.0, spec.noise_std);
      }
      for (std::size_t j = 0; j < spec.d2; ++j) {
        out.kernel_features.at(row, j) = kernel_u * u_kernel[j] +
                                         kernel_w * w_kernel[j] +
                                         noise_rng.normal(0.0, spec.noise_std);
      }
    }
  }
  return out;
}

}  // namespace evsefl
