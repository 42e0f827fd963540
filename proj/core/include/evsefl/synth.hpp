#pragma once

#include <cstdint>

#include "evsefl/dataset.hpp"

namespace evsefl {

/// How class identity is planted across the two modalities.
///
/// Each modality gets two seeded orthonormal directions u and w, dense over
/// all of its coordinates, and samples are signal + N(0, noise_std^2) noise.
///
/// Independent: class 0 plants -2u, class 1 plants +2u, class 2 plants +2w,
/// in both modalities, so either modality alone linearly separates all
/// three classes.
///
/// JointOnly: classes 0 and 1 differ only in the sign pairing of the two
/// modalities. Per sample a latent sign r is drawn; the network modality
/// plants 2r*u while the kernel modality plants 2r*u for class 0 and
/// -2r*u for class 1. Marginally each modality is a symmetric +-2u coin
/// for both classes, so no single modality can separate 0 from 1 — only
/// the sign product across modalities can. Class 2 plants +2w in both
/// modalities and stays visible to either one.
enum class SynthCoupling { Independent, JointOnly };

struct SynthSpec {
  std::size_t n_per_class = 1000;
  std::size_t d1 = 48;  // network feature width
  std::size_t d2 = 60;  // kernel feature width
  SynthCoupling coupling = SynthCoupling::Independent;
  double noise_std = 0.1;
  std::uint64_t seed = 1;
};

/// Planted signal amplitude along u / w.
inline constexpr double kSynthSignal = 2.0;

/// Generate a labeled paired dataset per the recipe above. Rows are
/// grouped by class; bit-identical for identical specs.
PairedDataset synth_generate(const SynthSpec& spec);

}  // namespace evsefl
