#include "evsefl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evsefl/errors.hpp"
#include "evsefl/rng.hpp"

namespace evsefl {

namespace {
constexpr double kConstantStd = 1e-12;

// Marsaglia-Tsang gamma sampler; shape < 1 handled via the boost trick.
double sample_gamma(Rng& rng, double shape) {
  if (shape < 1.0) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}
}  // namespace

std::string modality_name(Modality m) {
  return m == Modality::NetworkTraffic ? "network" : "kernel";
}

NormStats compute_norm_stats(const Tensor& features) {
  const std::size_t n = features.dim(0), d = features.dim(1);
  NormStats stats;
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  if (n == 0) return stats;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) stats.mean[j] += features.at(i, j);
  for (std::size_t j = 0; j < d; ++j) stats.mean[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = features.at(i, j) - stats.mean[j];
      stats.stddev[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < d; ++j)
    stats.stddev[j] = std::sqrt(stats.stddev[j] / static_cast<double>(n));
  return stats;
}

Tensor apply_norm_stats(const Tensor& features, const NormStats& stats) {
  const std::size_t n = features.dim(0), d = features.dim(1);
  if (stats.mean.size() != d || stats.stddev.size() != d) {
    std::ostringstream msg;
    msg << "normalization stats dimension " << stats.mean.size()
        << " does not match feature dimension " << d;
    throw DimensionError(msg.str());
  }
  Tensor out({n, d});
  for (std::size_t j = 0; j < d; ++j) {
    if (stats.stddev[j] < kConstantStd) {
      for (std::size_t i = 0; i < n; ++i) out.at(i, j) = 0.0;
    } else {
      const double inv = 1.0 / stats.stddev[j];
      for (std::size_t i = 0; i < n; ++i)
        out.at(i, j) = (features.at(i, j) - stats.mean[j]) * inv;
    }
  }
  return out;
}

ModalityDataset normalize(const ModalityDataset& ds,
                          const std::optional<NormStats>& stats) {
  ModalityDataset out = ds;
  const NormStats used = stats ? *stats : compute_norm_stats(ds.features);
  out.features = apply_norm_stats(ds.features, used);
  out.norm_stats = used;
  return out;
}

std::vector<int> class_set(const std::vector<int>& labels) {
  std::vector<int> classes;
  for (int c = 0; c < kNumClasses; ++c) {
    if (std::find(labels.begin(), labels.end(), c) != labels.end())
      classes.push_back(c);
  }
  return classes;
}

std::vector<std::vector<std::size_t>> indices_by_class(
    const std::vector<int>& labels) {
  std::vector<std::vector<std::size_t>> by_class(kNumClasses);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = labels[i];
    if (c < 0 || c >= kNumClasses) {
      std::ostringstream msg;
      msg << "label " << c << " at row " << i << " outside [0, " << kNumClasses
          << ")";
      throw DataError(msg.str());
    }
    by_class[static_cast<std::size_t>(c)].push_back(i);
  }
  return by_class;
}

PairedDataset pair_modalities(const ModalityDataset& net,
                              const ModalityDataset& kernel,
                              std::optional<std::size_t> per_class_cap,
                              std::uint64_t seed) {
  const auto net_by_class = indices_by_class(net.labels);
  const auto kernel_by_class = indices_by_class(kernel.labels);

  for (int c = 0; c < kNumClasses; ++c) {
    const bool in_net = !net_by_class[c].empty();
    const bool in_kernel = !kernel_by_class[c].empty();
    if (in_net != in_kernel) {
      std::ostringstream msg;
      msg << "class " << c << " present only in the "
          << (in_net ? "network" : "kernel") << " modality; cannot pair";
      throw DataError(msg.str());
    }
  }

  std::size_t total = 0;
  std::vector<std::size_t> per_class(kNumClasses, 0);
  for (int c = 0; c < kNumClasses; ++c) {
    std::size_t n_c = std::min(net_by_class[c].size(), kernel_by_class[c].size());
    if (per_class_cap) n_c = std::min(n_c, *per_class_cap);
    per_class[c] = n_c;
    total += n_c;
  }

  PairedDataset out;
  out.pairing_seed = seed;
  out.net_features = Tensor({total, net.dim()});
  out.kernel_features = Tensor({total, kernel.dim()});
  out.labels.resize(total);

  std::size_t row = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    if (per_class[c] == 0) continue;
    auto net_rows = net_by_class[c];
    auto kernel_rows = kernel_by_class[c];
    Rng net_rng(derive_seed(seed, 0x6e6574ULL, static_cast<std::uint64_t>(c)));
    Rng kernel_rng(derive_seed(seed, 0x6b726eULL, static_cast<std::uint64_t>(c)));
    net_rng.shuffle(net_rows);
    kernel_rng.shuffle(kernel_rows);
    for (std::size_t i = 0; i < per_class[c]; ++i, ++row) {
      for (std::size_t j = 0; j < net.dim(); ++j)
        out.net_features.at(row, j) = net.features.at(net_rows[i], j);
      for (std::size_t j = 0; j < kernel.dim(); ++j)
        out.kernel_features.at(row, j) = kernel.features.at(kernel_rows[i], j);
      out.labels[row] = c;
    }
  }
  return out;
}

PairedDataset subset(const PairedDataset& ds,
                     const std::vector<std::size_t>& indices) {
  PairedDataset out;
  out.pairing_seed = ds.pairing_seed;
  out.net_features = Tensor({indices.size(), ds.net_dim()});
  out.kernel_features = Tensor({indices.size(), ds.kernel_dim()});
  out.labels.resize(indices.size());
  for (std::size_t row = 0; row < indices.size(); ++row) {
    const std::size_t src = indices[row];
    for (std::size_t j = 0; j < ds.net_dim(); ++j)
      out.net_features.at(row, j) = ds.net_features.at(src, j);
    for (std::size_t j = 0; j < ds.kernel_dim(); ++j)
      out.kernel_features.at(row, j) = ds.kernel_features.at(src, j);
    out.labels[row] = ds.labels[src];
  }
  return out;
}

std::pair<PairedDataset, PairedDataset> split(const PairedDataset& ds,
                                              double test_fraction,
                                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    std::ostringstream msg;
    msg << "test_fraction must lie in (0, 1), got " << test_fraction;
    throw DataError(msg.str());
  }
  const auto by_class = indices_by_class(ds.labels);
  std::vector<std::size_t> train_rows, test_rows;
  for (int c = 0; c < kNumClasses; ++c) {
    auto rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      std::ostringstream msg;
      msg << "class " << c << " has " << rows.size()
          << " sample(s); need at least 2 to split";
      throw DataError(msg.str());
    }
    Rng rng(derive_seed(seed, 0x73706c6974ULL, static_cast<std::uint64_t>(c)));
    rng.shuffle(rows);
    std::size_t n_test = static_cast<std::size_t>(
        std::floor(test_fraction * static_cast<double>(rows.size()) + 0.5));
    n_test = std::max<std::size_t>(1, std::min(n_test, rows.size() - 1));
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + n_test);
    train_rows.insert(train_rows.end(), rows.begin() + n_test, rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {subset(ds, train_rows), subset(ds, test_rows)};
}

std::vector<ClientShard> partition_clients(const PairedDataset& train,
                                           std::size_t n_clients,
                                           const PartitionConfig& config,
                                           std::uint64_t seed) {
  if (n_clients == 0) throw DataError("partition_clients requires n_clients >= 1");
  if (n_clients > train.n()) {
    std::ostringstream msg;
    msg << "cannot partition " << train.n() << " samples across " << n_clients
        << " clients";
    throw DataError(msg.str());
  }

  std::vector<ClientShard> shards(n_clients);
  for (std::size_t i = 0; i < n_clients; ++i) shards[i].client_id = i;

  const auto by_class = indices_by_class(train.labels);

  if (config.scheme == PartitionScheme::IidStratified) {
    for (int c = 0; c < kNumClasses; ++c) {
      auto rows = by_class[c];
      if (rows.empty()) continue;
      Rng rng(derive_seed(seed, 0x696964ULL, static_cast<std::uint64_t>(c)));
      rng.shuffle(rows);
      // Rotate the dealing offset per class so remainders spread across
      // clients instead of all landing on client 0.
      for (std::size_t i = 0; i < rows.size(); ++i)
        shards[(i + static_cast<std::size_t>(c)) % n_clients].indices.push_back(
            rows[i]);
    }
  } else {
    for (int c = 0; c < kNumClasses; ++c) {
      auto rows = by_class[c];
      if (rows.empty()) continue;
      Rng rng(derive_seed(seed, 0x736b6577ULL, static_cast<std::uint64_t>(c)));
      rng.shuffle(rows);
      // Dirichlet(alpha) proportions over clients for this class.
      std::vector<double> weights(n_clients);
      double weight_sum = 0.0;
      for (std::size_t i = 0; i < n_clients; ++i) {
        weights[i] = sample_gamma(rng, config.alpha);
        weight_sum += weights[i];
      }
      // Largest-remainder rounding of proportional counts.
      std::vector<std::size_t> counts(n_clients, 0);
      std::vector<std::pair<double, std::size_t>> remainders(n_clients);
      std::size_t assigned = 0;
      for (std::size_t i = 0; i < n_clients; ++i) {
        const double exact =
            weights[i] / weight_sum * static_cast<double>(rows.size());
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        remainders[i] = {exact - std::floor(exact), i};
        assigned += counts[i];
      }
      std::sort(remainders.begin(), remainders.end(),
                [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
                });
      for (std::size_t k = 0; assigned < rows.size(); ++k, ++assigned)
        counts[remainders[k % n_clients].second] += 1;
      std::size_t cursor = 0;
      for (std::size_t i = 0; i < n_clients; ++i) {
        for (std::size_t k = 0; k < counts[i]; ++k)
          shards[i].indices.push_back(rows[cursor++]);
      }
    }
    // Skewed draws can starve a client; move singles out of the largest shard.
    for (std::size_t i = 0; i < n_clients; ++i) {
      if (!shards[i].indices.empty()) continue;
      std::size_t largest = 0;
      for (std::size_t k = 1; k < n_clients; ++k) {
        if (shards[k].indices.size() > shards[largest].indices.size())
          largest = k;
      }
      shards[i].indices.push_back(shards[largest].indices.back());
      shards[largest].indices.pop_back();
    }
  }

  for (auto& shard : shards) std::sort(shard.indices.begin(), shard.indices.end());
  return shards;
}

std::pair<NormStats, NormStats> normalize_paired(PairedDataset& train,
                                                 PairedDataset& test) {
  NormStats net_stats = compute_norm_stats(train.net_features);
  NormStats kernel_stats = compute_norm_stats(train.kernel_features);
  train.net_features = apply_norm_stats(train.net_features, net_stats);
  train.kernel_features = apply_norm_stats(train.kernel_features, kernel_stats);
  test.net_features = apply_norm_stats(test.net_features, net_stats);
  test.kernel_features = apply_norm_stats(test.kernel_features, kernel_stats);
  return {net_stats, kernel_stats};
}

}  // namespace evsefl
