#include "evsefl/federated.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "evsefl/errors.hpp"
#include "evsefl/rng.hpp"

namespace evsefl {

namespace {
constexpr std::uint64_t kGlobalInitStream = 0x676c6f62ULL;   // "glob"
constexpr std::uint64_t kParticipationStream = 0x70617274ULL;  // "part"
constexpr std::uint64_t kCentralizedStream = 0x63656e74ULL;    // "cent"
}  // namespace

void FedConfig::validate() const {
  if (n_clients < 1) throw TrainError("FedConfig: n_clients must be >= 1");
  if (rounds < 1) throw TrainError("FedConfig: rounds must be >= 1");
  if (local_epochs < 1) throw TrainError("FedConfig: local_epochs must be >= 1");
  if (batch < 1) throw TrainError("FedConfig: batch must be >= 1");
  if (!(participation > 0.0 && participation <= 1.0)) {
    std::ostringstream msg;
    msg << "FedConfig: participation " << participation << " outside (0, 1]";
    throw TrainError(msg.str());
  }
}

std::string RoundReport::to_json_line() const {
  nlohmann::json j;
  j["round"] = round;
  j["clients"] = client_ids;
  j["weights"] = weights;
  j["loss"] = train_loss;
  j["accuracy"] = metrics.accuracy;
  j["precision"] = metrics.precision_weighted;
  j["recall"] = metrics.recall_weighted;
  j["f1"] = metrics.f1_weighted;
  j["fpr"] = metrics.fpr_binary;
  j["duration_ms"] = duration_ms;
  return j.dump();
}

ClientUpdate local_update(const CnnModel& global_model, const FusedDataset& shard,
                          std::size_t client_id, const TrainConfig& local_config) {
  if (shard.n() == 0) {
    std::ostringstream msg;
    msg << "client " << client_id << " has an empty shard";
    throw TrainError(msg.str());
  }
  CnnModel local = global_model;  // the global object is never touched
  const auto stats = local.train_epochs(shard.features, shard.labels, local_config);
  ClientUpdate update;
  update.client_id = client_id;
  update.params = local.flat_params();
  update.sample_count = shard.n();
  update.train_loss = stats.back().loss;
  return update;
}

std::vector<double> aggregate_weighted(const std::vector<ClientUpdate>& updates) {
  if (updates.empty())
    throw TrainError("aggregate_weighted needs at least one update");
  const std::size_t dim = updates.front().params.size();
  std::size_t total_samples = 0;
  for (const ClientUpdate& u : updates) {
    if (u.params.size() != dim) {
      std::ostringstream msg;
      msg << "client " << u.client_id << " update has " << u.params.size()
          << " parameters, expected " << dim;
      throw DimensionError(msg.str());
    }
    total_samples += u.sample_count;
  }
  if (total_samples == 0)
    throw TrainError("aggregate_weighted: zero total samples across updates");

  std::vector<double> global(dim, 0.0);
  for (const ClientUpdate& u : updates) {
    const double w = static_cast<double>(u.sample_count) /
                     static_cast<double>(total_samples);
    for (std::size_t i = 0; i < dim; ++i) global[i] += w * u.params[i];
  }
  return global;
}

FederatedRun run_federated(const FedConfig& cfg, const CnnConfig& arch,
                           const std::vector<FusedDataset>& shards,
                           const FusedDataset& test) {
  cfg.validate();
  if (shards.size() != cfg.n_clients) {
    std::ostringstream msg;
    msg << "run_federated: " << shards.size() << " shards for "
        << cfg.n_clients << " clients";
    throw TrainError(msg.str());
  }

  CnnModel model(arch, derive_seed(cfg.seed, kGlobalInitStream));
  const std::size_t jobs =
      cfg.jobs > 0 ? cfg.jobs
                   : std::max<std::size_t>(1, std::thread::hardware_concurrency());

  std::vector<RoundReport> reports;
  reports.reserve(cfg.rounds);

  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    const auto started = std::chrono::steady_clock::now();
    RoundReport report;
    report.round = round;

    // Participant draw: ceil(participation * N) ids, fixed order afterwards.
    std::vector<std::size_t> participants(cfg.n_clients);
    for (std::size_t i = 0; i < cfg.n_clients; ++i) participants[i] = i;
    if (cfg.participation < 1.0) {
      const auto k = static_cast<std::size_t>(std::ceil(
          cfg.participation * static_cast<double>(cfg.n_clients)));
      Rng draw(derive_seed(cfg.seed, kParticipationStream, round));
      draw.shuffle(participants);
      participants.resize(k);
      std::sort(participants.begin(), participants.end());
    }

    std::vector<std::size_t> active;
    for (std::size_t id : participants) {
      if (shards[id].n() == 0) {
        std::cerr << "round " << round << ": skipping client " << id
                  << " (empty shard)\n";
        report.skipped_clients.push_back(id);
      } else {
        active.push_back(id);
      }
    }
    if (active.empty()) {
      std::ostringstream msg;
      msg << "round " << round << ": no client has data";
      throw TrainError(msg.str());
    }

    // Parallel local updates; results land in client order, so the
    // aggregation below is independent of the execution schedule.
    std::vector<ClientUpdate> updates(active.size());
    for (std::size_t base = 0; base < active.size(); base += jobs) {
      const std::size_t count = std::min(jobs, active.size() - base);
      std::vector<std::future<ClientUpdate>> futures;
      futures.reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t id = active[base + k];
        TrainConfig local_config;
        local_config.epochs = cfg.local_epochs;
        local_config.batch = cfg.batch;
        local_config.lr = cfg.lr;
        local_config.optimizer = cfg.optimizer;
        local_config.seed = derive_seed(cfg.seed, id, round);
        futures.push_back(std::async(
            std::launch::async, [&model, &shards, id, local_config]() {
              return local_update(model, shards[id], id, local_config);
            }));
      }
      for (std::size_t k = 0; k < count; ++k) {
        try {
          updates[base + k] = futures[k].get();
        } catch (const std::exception& e) {
          std::ostringstream msg;
          msg << "round " << round << ", client " << active[base + k] << ": "
              << e.what();
          throw TrainError(msg.str());
        }
      }
    }

    model.set_flat_params(aggregate_weighted(updates));

    std::size_t total_samples = 0;
    for (const ClientUpdate& u : updates) total_samples += u.sample_count;
    for (const ClientUpdate& u : updates) {
      report.client_ids.push_back(u.client_id);
      const double w = static_cast<double>(u.sample_count) /
                       static_cast<double>(total_samples);
      report.weights.push_back(w);
      report.train_loss += w * u.train_loss;
    }

    report.metrics = evaluate_fused(model, test);
    report.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  started)
            .count();
    reports.push_back(std::move(report));
  }

  return FederatedRun{std::move(model), std::move(reports)};
}

CentralizedRun run_centralized(const FedConfig& cfg, const CnnConfig& arch,
                               const FusedDataset& train,
                               const FusedDataset& test) {
  cfg.validate();
  if (train.n() == 0) throw TrainError("run_centralized: empty training set");

  CnnModel model(arch, derive_seed(cfg.seed, kGlobalInitStream));
  TrainConfig train_config;
  train_config.epochs = cfg.rounds * cfg.local_epochs;  // budget-matched
  train_config.batch = cfg.batch;
  train_config.lr = cfg.lr;
  train_config.optimizer = cfg.optimizer;
  train_config.seed = derive_seed(cfg.seed, kCentralizedStream);

  auto epochs = model.train_epochs(train.features, train.labels, train_config);
  MetricsReport metrics = evaluate_fused(model, test);
  return CentralizedRun{std::move(model), std::move(epochs), std::move(metrics)};
}

}  // namespace evsefl
