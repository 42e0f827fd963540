#include "evsefl/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "evsefl/errors.hpp"
#include "evsefl/rng.hpp"

namespace evsefl {

namespace {

constexpr std::uint64_t kSynthStream = 0x73796eULL;       // "syn"
constexpr std::uint64_t kPairStream = 0x70616972ULL;      // "pair"
constexpr std::uint64_t kSplitStream = 0x73706c74ULL;     // "splt"
constexpr std::uint64_t kAeStream = 0x6165ULL;            // "ae"
constexpr std::uint64_t kClientAeStream = 0x636165ULL;    // "cae"
constexpr std::uint64_t kTrainPartStream = 0x7472706cULL; // "trpl"
constexpr std::uint64_t kTestPartStream = 0x7465706cULL;  // "tepl"
constexpr std::uint64_t kArmStream = 0x61726dULL;         // "arm"
constexpr std::uint64_t kSweepStream = 0x73776565ULL;     // "swee"

const char* kClassNames[kNumClasses] = {"Benign", "DoS", "Recon"};

std::size_t effective_jobs(std::size_t jobs) {
  return jobs > 0 ? jobs
                  : std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

AutoencoderConfig clamp_ae_batch(AutoencoderConfig config, std::size_t n) {
  config.batch = std::max<std::size_t>(1, std::min(config.batch, n));
  return config;
}

CnnConfig fused_arch(CnnConfig base) {
  base.input_len = 2 * kLatentDim;
  return base;
}

CnnConfig single_arch(CnnConfig base) {
  base.input_len = kLatentDim;
  return base;
}

TrainConfig local_train_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  TrainConfig tc;
  tc.epochs = cfg.fed.rounds * cfg.fed.local_epochs;  // budget-matched
  tc.batch = cfg.fed.batch;
  tc.lr = cfg.fed.lr;
  tc.optimizer = OptimizerKind::Adam;
  tc.seed = seed;
  return tc;
}

FusedDataset concat_fused(const std::vector<FusedDataset>& parts) {
  std::size_t total = 0;
  std::size_t dim = 0;
  for (const FusedDataset& p : parts) {
    total += p.n();
    if (p.dim() > 0) dim = p.dim();
  }
  FusedDataset out;
  out.features = Tensor({total, dim});
  out.labels.reserve(total);
  std::size_t row = 0;
  for (const FusedDataset& p : parts) {
    for (std::size_t i = 0; i < p.n(); ++i, ++row) {
      for (std::size_t j = 0; j < dim; ++j)
        out.features.at(row, j) = p.features.at(i, j);
      out.labels.push_back(p.labels[i]);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config (de)serialization
// ---------------------------------------------------------------------------

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["jobs"] = jobs;
  j["test_fraction"] = test_fraction;
  if (per_class_cap)
    j["per_class_cap"] = *per_class_cap;
  else
    j["per_class_cap"] = nullptr;
  j["dataset"] = {{"net", dataset_net},
                  {"kernel", dataset_kernel},
                  {"paired", dataset_paired},
                  {"label_column", schema.label_column},
                  {"label_map", schema.label_value_map}};
  j["synth"] = {{"n_per_class", synth.n_per_class},
                {"d1", synth.d1},
                {"d2", synth.d2},
                {"coupling", synth.coupling == SynthCoupling::Independent
                                 ? "independent"
                                 : "joint-only"},
                {"noise_std", synth.noise_std}};
  j["ae"] = {{"hidden", ae.hidden},
             {"epochs", ae.epochs},
             {"batch", ae.batch},
             {"lr", ae.lr}};
  j["cnn"] = {{"conv1_filters", cnn.conv1_filters},
              {"conv1_kernel", cnn.conv1_kernel},
              {"conv2_filters", cnn.conv2_filters},
              {"conv2_kernel", cnn.conv2_kernel},
              {"pool_window", cnn.pool_window}};
  j["fed"] = {{"n_clients", fed.n_clients},
              {"rounds", fed.rounds},
              {"local_epochs", fed.local_epochs},
              {"batch", fed.batch},
              {"lr", fed.lr},
              {"participation", fed.participation}};
  j["partition"] = {{"scheme", partition.scheme == PartitionScheme::IidStratified
                                   ? "iid"
                                   : "label-skew"},
                    {"alpha", partition.alpha}};
  j["sweep_clients"] = sweep_clients;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed experiment config: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
  if (j.contains("per_class_cap") && !j["per_class_cap"].is_null())
    cfg.per_class_cap = j["per_class_cap"].get<std::size_t>();

  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    cfg.dataset_net = d.value("net", cfg.dataset_net);
    cfg.dataset_kernel = d.value("kernel", cfg.dataset_kernel);
    cfg.dataset_paired = d.value("paired", cfg.dataset_paired);
    cfg.schema.label_column = d.value("label_column", cfg.schema.label_column);
    if (d.contains("label_map"))
      cfg.schema.label_value_map =
          d["label_map"].get<std::map<std::string, int>>();
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    cfg.synth.n_per_class = s.value("n_per_class", cfg.synth.n_per_class);
    cfg.synth.d1 = s.value("d1", cfg.synth.d1);
    cfg.synth.d2 = s.value("d2", cfg.synth.d2);
    cfg.synth.noise_std = s.value("noise_std", cfg.synth.noise_std);
    const std::string coupling = s.value("coupling", std::string("independent"));
    if (coupling == "independent") {
      cfg.synth.coupling = SynthCoupling::Independent;
    } else if (coupling == "joint-only") {
      cfg.synth.coupling = SynthCoupling::JointOnly;
    } else {
      throw DataError("unknown synth coupling '" + coupling + "'");
    }
  }
  if (j.contains("ae")) {
    const auto& a = j["ae"];
    cfg.ae.hidden = a.value("hidden", cfg.ae.hidden);
    cfg.ae.epochs = a.value("epochs", cfg.ae.epochs);
    cfg.ae.batch = a.value("batch", cfg.ae.batch);
    cfg.ae.lr = a.value("lr", cfg.ae.lr);
  }
  if (j.contains("cnn")) {
    const auto& c = j["cnn"];
    cfg.cnn.conv1_filters = c.value("conv1_filters", cfg.cnn.conv1_filters);
    cfg.cnn.conv1_kernel = c.value("conv1_kernel", cfg.cnn.conv1_kernel);
    cfg.cnn.conv2_filters = c.value("conv2_filters", cfg.cnn.conv2_filters);
    cfg.cnn.conv2_kernel = c.value("conv2_kernel", cfg.cnn.conv2_kernel);
    cfg.cnn.pool_window = c.value("pool_window", cfg.cnn.pool_window);
  }
  if (j.contains("fed")) {
    const auto& f = j["fed"];
    cfg.fed.n_clients = f.value("n_clients", cfg.fed.n_clients);
    cfg.fed.rounds = f.value("rounds", cfg.fed.rounds);
    cfg.fed.local_epochs = f.value("local_epochs", cfg.fed.local_epochs);
    cfg.fed.batch = f.value("batch", cfg.fed.batch);
    cfg.fed.lr = f.value("lr", cfg.fed.lr);
    cfg.fed.participation = f.value("participation", cfg.fed.participation);
  }
  if (j.contains("partition")) {
    const auto& p = j["partition"];
    const std::string scheme = p.value("scheme", std::string("iid"));
    if (scheme == "iid") {
      cfg.partition.scheme = PartitionScheme::IidStratified;
    } else if (scheme == "label-skew") {
      cfg.partition.scheme = PartitionScheme::LabelSkew;
    } else {
      throw DataError("unknown partition scheme '" + scheme + "'");
    }
    cfg.partition.alpha = p.value("alpha", cfg.partition.alpha);
  }
  if (j.contains("sweep_clients"))
    cfg.sweep_clients = j["sweep_clients"].get<std::vector<std::size_t>>();

  cfg.synth.seed = derive_seed(cfg.seed, kSynthStream);
  cfg.fed.seed = cfg.seed;
  cfg.fed.jobs = cfg.jobs;
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

// ---------------------------------------------------------------------------
// Data preparation
// ---------------------------------------------------------------------------

PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData out;
  PairedDataset paired;

  if (!cfg.dataset_paired.empty()) {
    paired = load_paired_csv(cfg.dataset_paired);
  } else if (!cfg.dataset_net.empty() || !cfg.dataset_kernel.empty()) {
    if (cfg.dataset_net.empty() || cfg.dataset_kernel.empty())
      throw DataError("both --dataset-net and --dataset-kernel are required");
    IngestReport net_report, kernel_report;
    ModalityDataset net = load_csv(cfg.dataset_net, cfg.schema,
                                   Modality::NetworkTraffic, &net_report);
    ModalityDataset kernel = load_csv(cfg.dataset_kernel, cfg.schema,
                                      Modality::KernelHpc, &kernel_report);
    out.ingest_reports = {net_report, kernel_report};
    paired = pair_modalities(net, kernel, cfg.per_class_cap,
                             derive_seed(cfg.seed, kPairStream));
  } else {
    paired = synth_generate(cfg.synth);
  }

  auto [train, test] = split(paired, cfg.test_fraction,
                             derive_seed(cfg.seed, kSplitStream));
  normalize_paired(train, test);
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

// ---------------------------------------------------------------------------
// Federated data pipeline: local AEs per client, CNN shared
// ---------------------------------------------------------------------------

FederatedDataPipeline build_federated_pipeline(const ExperimentConfig& cfg,
                                               const PreparedData& data,
                                               std::size_t n_clients) {
  FederatedDataPipeline pipe;
  const auto train_shards = partition_clients(
      data.train, n_clients, cfg.partition, derive_seed(cfg.seed, kTrainPartStream));
  PartitionConfig iid;  // test slices stay iid so every client sees all classes
  const auto test_slices = partition_clients(
      data.test, n_clients, iid, derive_seed(cfg.seed, kTestPartStream));

  pipe.client_train.resize(n_clients);
  pipe.client_test.resize(n_clients);

  struct ClientPrep {
    Autoencoder net_ae;
    Autoencoder kernel_ae;
    FusedDataset train;
    FusedDataset test;
  };

  auto prep_client = [&](std::size_t id) {
    const PairedDataset local_train = subset(data.train, train_shards[id].indices);
    const PairedDataset local_test = subset(data.test, test_slices[id].indices);
    // Every client trains from the same broadcast initialization; training
    // itself stays local (per-client shuffle streams, no pooled data).
    // Distinct inits would give each station an incompatible latent
    // geometry that no shared classifier can fit after averaging.
    const std::uint64_t init_base = derive_seed(cfg.seed, kClientAeStream);
    const std::uint64_t shuffle_base = derive_seed(cfg.seed, kClientAeStream, id + 1);
    auto [net_ae, net_hist] = train_autoencoder(
        Modality::NetworkTraffic, local_train.net_features,
        clamp_ae_batch(cfg.ae, local_train.n()),
        derive_seed(init_base, 0), derive_seed(shuffle_base, 0));
    auto [kernel_ae, kernel_hist] = train_autoencoder(
        Modality::KernelHpc, local_train.kernel_features,
        clamp_ae_batch(cfg.ae, local_train.n()),
        derive_seed(init_base, 1), derive_seed(shuffle_base, 1));
    FusedDataset fused_train = encode_and_fuse(net_ae, kernel_ae, local_train);
    FusedDataset fused_test = encode_and_fuse(net_ae, kernel_ae, local_test);
    return ClientPrep{std::move(net_ae), std::move(kernel_ae),
                      std::move(fused_train), std::move(fused_test)};
  };

  const std::size_t jobs = effective_jobs(cfg.jobs);
  std::vector<std::optional<ClientPrep>> prepped(n_clients);
  for (std::size_t base = 0; base < n_clients; base += jobs) {
    const std::size_t count = std::min(jobs, n_clients - base);
    std::vector<std::future<ClientPrep>> futures;
    futures.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t id = base + k;
      futures.push_back(std::async(std::launch::async, prep_client, id));
    }
    for (std::size_t k = 0; k < count; ++k)
      prepped[base + k].emplace(futures[k].get());
  }

  for (std::size_t id = 0; id < n_clients; ++id) {
    ClientPrep& prep = *prepped[id];
    pipe.client_train[id] = std::move(prep.train);
    pipe.client_test[id] = std::move(prep.test);
    pipe.client_aes.emplace_back(std::move(prep.net_ae),
                                 std::move(prep.kernel_ae));
  }
  pipe.pooled_test = concat_fused(pipe.client_test);
  return pipe;
}

// ---------------------------------------------------------------------------
// Centralized training pipeline
// ---------------------------------------------------------------------------

TrainOutput run_training(const ExperimentConfig& cfg, const PreparedData& data) {
  const AutoencoderConfig ae_cfg = clamp_ae_batch(cfg.ae, data.train.n());

  // The two modality autoencoders are independent; train them concurrently.
  auto net_future = std::async(std::launch::async, [&]() {
    return train_autoencoder(Modality::NetworkTraffic, data.train.net_features,
                             ae_cfg, derive_seed(cfg.seed, kAeStream, 0));
  });
  auto [kernel_ae, kernel_hist] =
      train_autoencoder(Modality::KernelHpc, data.train.kernel_features, ae_cfg,
                        derive_seed(cfg.seed, kAeStream, 1));
  auto [net_ae, net_hist] = net_future.get();

  const FusedDataset fused_train = encode_and_fuse(net_ae, kernel_ae, data.train);
  const FusedDataset fused_test = encode_and_fuse(net_ae, kernel_ae, data.test);

  CentralizedRun run =
      run_centralized(cfg.fed, fused_arch(cfg.cnn), fused_train, fused_test);

  TrainOutput out{ModelBundle{std::move(net_ae), std::move(kernel_ae),
                              std::move(run.model)},
                  std::move(run.metrics),
                  {std::move(net_hist), std::move(kernel_hist)},
                  std::move(run.epochs)};
  return out;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ExperimentResult experiment_fusion_vs_single(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.name = "fusion-vs-single";

  const PreparedData data = prepare_data(cfg);
  const AutoencoderConfig ae_cfg = clamp_ae_batch(cfg.ae, data.train.n());

  auto [net_ae, net_hist] =
      train_autoencoder(Modality::NetworkTraffic, data.train.net_features,
                        ae_cfg, derive_seed(cfg.seed, kAeStream, 0));
  auto [kernel_ae, kernel_hist] =
      train_autoencoder(Modality::KernelHpc, data.train.kernel_features, ae_cfg,
                        derive_seed(cfg.seed, kAeStream, 1));

  const Tensor z_net_train = net_ae.encode(data.train.net_features);
  const Tensor z_kernel_train = kernel_ae.encode(data.train.kernel_features);
  const Tensor z_net_test = net_ae.encode(data.test.net_features);
  const Tensor z_kernel_test = kernel_ae.encode(data.test.kernel_features);

  struct Arm {
    std::string scope;
    CnnConfig arch;
    const Tensor* train;
    const Tensor* test;
  };
  const Tensor fused_train = fuse(z_net_train, z_kernel_train);
  const Tensor fused_test = fuse(z_net_test, z_kernel_test);
  const std::vector<Arm> arms = {
      {"fused", fused_arch(cfg.cnn), &fused_train, &fused_test},
      {"network", single_arch(cfg.cnn), &z_net_train, &z_net_test},
      {"kernel", single_arch(cfg.cnn), &z_kernel_train, &z_kernel_test},
  };

  for (std::size_t a = 0; a < arms.size(); ++a) {
    const Arm& arm = arms[a];
    CnnModel model(arm.arch, derive_seed(cfg.seed, kArmStream, a));
    model.train_epochs(*arm.train, data.train.labels,
                       local_train_config(cfg, derive_seed(cfg.seed, kArmStream, 100 + a)));
    FusedDataset test_set{*arm.test, data.test.labels};
    result.rows.push_back({arm.scope, evaluate_fused(model, test_set)});
  }
  return result;
}

ExperimentResult experiment_centralized_vs_federated(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.name = "centralized-vs-federated";

  const PreparedData data = prepare_data(cfg);
  const std::size_t n_clients = cfg.fed.n_clients;

  PartitionConfig iid;
  const auto test_slices = partition_clients(
      data.test, n_clients, iid, derive_seed(cfg.seed, kTestPartStream));

  // Centralized arm: pooled data, budget-matched epochs.
  TrainOutput central = run_training(cfg, data);
  result.rows.push_back({"centralized", central.metrics});

  // Federated arm: per-client encoders, shared CNN.
  FederatedDataPipeline pipe = build_federated_pipeline(cfg, data, n_clients);
  FedConfig fed = cfg.fed;
  fed.jobs = cfg.jobs;
  FederatedRun fed_run =
      run_federated(fed, fused_arch(cfg.cnn), pipe.client_train, pipe.pooled_test);
  result.rows.push_back(
      {"federated", evaluate_fused(fed_run.model, pipe.pooled_test)});
  result.rounds = std::move(fed_run.rounds);

  for (std::size_t id = 0; id < n_clients; ++id) {
    std::ostringstream scope;
    scope << "centralized_client_" << id;
    result.rows.push_back(
        {scope.str(),
         evaluate(central.bundle, subset(data.test, test_slices[id].indices))});
  }
  for (std::size_t id = 0; id < n_clients; ++id) {
    std::ostringstream scope;
    scope << "federated_client_" << id;
    result.rows.push_back(
        {scope.str(), evaluate_fused(fed_run.model, pipe.client_test[id])});
  }
  return result;
}

ExperimentResult experiment_client_sweep(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.name = "client-sweep";

  const PreparedData data = prepare_data(cfg);
  for (std::size_t n_clients : cfg.sweep_clients) {
    ExperimentConfig arm_cfg = cfg;
    arm_cfg.fed.n_clients = n_clients;
    arm_cfg.seed = derive_seed(cfg.seed, kSweepStream, n_clients);
    arm_cfg.fed.seed = arm_cfg.seed;

    FederatedDataPipeline pipe =
        build_federated_pipeline(arm_cfg, data, n_clients);
    FederatedRun run = run_federated(arm_cfg.fed, fused_arch(cfg.cnn),
                                     pipe.client_train, pipe.pooled_test);
    std::ostringstream scope;
    scope << "clients_" << n_clients;
    result.rows.push_back(
        {scope.str(), evaluate_fused(run.model, pipe.pooled_test)});
    for (RoundReport& report : run.rounds)
      result.rounds.push_back(std::move(report));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

std::string ExperimentResult::summary_grid() const {
  std::ostringstream out;
  out << std::left << std::setw(26) << "scope" << std::right << std::setw(10)
      << "accuracy" << std::setw(11) << "precision" << std::setw(9) << "recall"
      << std::setw(9) << "f1" << std::setw(9) << "fpr" << "\n";
  for (const ResultRow& row : rows) {
    out << std::left << std::setw(26) << row.scope << std::right << std::fixed
        << std::setprecision(2) << std::setw(10) << row.metrics.accuracy
        << std::setw(11) << row.metrics.precision_weighted << std::setw(9)
        << row.metrics.recall_weighted << std::setw(9) << row.metrics.f1_weighted
        << std::setw(9) << row.metrics.fpr_binary << "\n";
  }
  return out.str();
}

void write_run_artifacts(const ExperimentConfig& cfg,
                         const ExperimentResult& result) {
  if (cfg.out_dir.empty()) return;
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);

  {
    std::ofstream out(dir / "config.json");
    out << cfg.to_json() << "\n";
  }
  {
    std::ofstream out(dir / "metrics.csv");
    out << MetricsReport::csv_header() << "\n";
    for (const ResultRow& row : result.rows)
      out << row.metrics.csv_row(row.scope) << "\n";
  }
  {
    nlohmann::json j;
    j["experiment"] = result.name;
    j["seed"] = cfg.seed;
    auto& scopes = j["results"] = nlohmann::json::array();
    for (const ResultRow& row : result.rows) {
      nlohmann::json entry = nlohmann::json::parse(row.metrics.to_json());
      entry["scope"] = row.scope;
      scopes.push_back(std::move(entry));
    }
    std::ofstream out(dir / "metrics.json");
    out << j.dump(2) << "\n";
  }
  if (!result.rounds.empty()) {
    std::ofstream out(dir / "rounds.jsonl");
    for (const RoundReport& report : result.rounds)
      out << report.to_json_line() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Paired CSV round trip
// ---------------------------------------------------------------------------

void save_paired_csv(const std::string& path, const PairedDataset& data) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot open " + path + " for writing");
  for (std::size_t j = 0; j < data.net_dim(); ++j) out << "net_" << j << ",";
  for (std::size_t j = 0; j < data.kernel_dim(); ++j) out << "kernel_" << j << ",";
  out << "label\n";
  char buf[40];
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.net_dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.net_features.at(i, j));
      out << buf << ",";
    }
    for (std::size_t j = 0; j < data.kernel_dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.kernel_features.at(i, j));
      out << buf << ",";
    }
    out << kClassNames[data.labels[i]] << "\n";
  }
}

PairedDataset load_paired_csv(const std::string& path) {
  CsvSchema schema;  // default label map covers the class names we write
  schema.label_column = "label";
  IngestReport report;
  // Reuse the modality loader on the combined table, then split columns.
  ModalityDataset combined =
      load_csv(path, schema, Modality::NetworkTraffic, &report);
  std::size_t d1 = 0, d2 = 0;
  for (const std::string& name : combined.feature_names) {
    if (name.rfind("net_", 0) == 0) {
      ++d1;
    } else if (name.rfind("kernel_", 0) == 0) {
      ++d2;
    } else {
      throw IngestError(path + ": unexpected column '" + name +
                        "' in paired CSV");
    }
  }
  if (d1 == 0 || d2 == 0)
    throw IngestError(path + ": paired CSV needs net_* and kernel_* columns");

  PairedDataset out;
  out.net_features = Tensor({combined.n(), d1});
  out.kernel_features = Tensor({combined.n(), d2});
  out.labels = combined.labels;
  for (std::size_t i = 0; i < combined.n(); ++i) {
    std::size_t net_col = 0, kernel_col = 0;
    for (std::size_t j = 0; j < combined.dim(); ++j) {
      if (combined.feature_names[j].rfind("net_", 0) == 0)
        out.net_features.at(i, net_col++) = combined.features.at(i, j);
      else
        out.kernel_features.at(i, kernel_col++) = combined.features.at(i, j);
    }
  }
  return out;
}

}  // namespace evsefl
