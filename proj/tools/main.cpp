// evsefl: federated multimodal intrusion-detection workbench for EV
// charging telemetry. Subcommands: ingest, synth, train-ae, train,
// train-fed, eval, experiment.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evsefl/autoencoder.hpp"
#include "evsefl/rng.hpp"
#include "evsefl/checkpoint.hpp"
#include "evsefl/csv.hpp"
#include "evsefl/errors.hpp"
#include "evsefl/experiments.hpp"
#include "evsefl/federated.hpp"
#include "evsefl/metrics.hpp"
#include "evsefl/synth.hpp"

namespace fs = std::filesystem;
using namespace evsefl;

namespace {

// Flags shared by the data-consuming subcommands. Values set on the command
// line override the config file.
struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> jobs;
  std::optional<std::string> dataset_net;
  std::optional<std::string> dataset_kernel;
  std::optional<std::string> dataset_paired;
  std::optional<std::size_t> clients;
  std::optional<std::size_t> rounds;
  std::optional<std::size_t> cap_per_class;
  std::optional<std::string> synth_spec;
  std::optional<std::string> label_column;
  std::optional<std::string> label_map;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "JSON run description; flags override file values");
  cmd->add_option("--seed", flags.seed, "Master seed for the whole run");
  cmd->add_option("--out", flags.out_dir, "Output directory for run artifacts");
  cmd->add_option("--jobs", flags.jobs,
                  "Parallel client workers (default: hardware threads)");
  cmd->add_option("--dataset-net", flags.dataset_net,
                  "Network-traffic feature CSV");
  cmd->add_option("--dataset-kernel", flags.dataset_kernel,
                  "Kernel/HPC feature CSV");
  cmd->add_option("--dataset-paired", flags.dataset_paired,
                  "Row-aligned paired CSV (net_*/kernel_* columns)");
  cmd->add_option("--clients", flags.clients, "Number of simulated stations");
  cmd->add_option("--rounds", flags.rounds, "Federated rounds");
  cmd->add_option("--cap-per-class", flags.cap_per_class,
                  "Cap pairs per class during modality pairing");
  cmd->add_option("--synth", flags.synth_spec,
                  "Synthetic data spec: independent|joint-only"
                  "[,n=N][,noise=S][,d1=D][,d2=D]");
  cmd->add_option("--label-column", flags.label_column,
                  "Label column name (default: Label)");
  cmd->add_option("--label-map", flags.label_map,
                  "Label mapping, e.g. Benign=0,DoS=1,Recon=2");
}

std::map<std::string, int> parse_label_map(const std::string& text) {
  std::map<std::string, int> map;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw DataError("--label-map entries must look like Name=0, got '" +
                      item + "'");
    map[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
  }
  return map;
}

SynthSpec parse_synth_spec(const std::string& text, SynthSpec base) {
  std::stringstream ss(text);
  std::string item;
  bool first = true;
  while (std::getline(ss, item, ',')) {
    if (first) {
      if (item == "independent") {
        base.coupling = SynthCoupling::Independent;
      } else if (item == "joint-only") {
        base.coupling = SynthCoupling::JointOnly;
      } else {
        throw DataError("--synth coupling must be independent or joint-only");
      }
      first = false;
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw DataError("--synth parameters must look like key=value, got '" +
                      item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "n") {
      base.n_per_class = std::stoul(value);
    } else if (key == "noise") {
      base.noise_std = std::stod(value);
    } else if (key == "d1") {
      base.d1 = std::stoul(value);
    } else if (key == "d2") {
      base.d2 = std::stoul(value);
    } else {
      throw DataError("unknown --synth parameter '" + key + "'");
    }
  }
  if (first) throw DataError("--synth needs a coupling mode");
  return base;
}

ExperimentConfig build_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty())
    cfg = ExperimentConfig::from_json_file(flags.config_path);

  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (flags.dataset_net) cfg.dataset_net = *flags.dataset_net;
  if (flags.dataset_kernel) cfg.dataset_kernel = *flags.dataset_kernel;
  if (flags.dataset_paired) cfg.dataset_paired = *flags.dataset_paired;
  if (flags.clients) cfg.fed.n_clients = *flags.clients;
  if (flags.rounds) cfg.fed.rounds = *flags.rounds;
  if (flags.cap_per_class) cfg.per_class_cap = *flags.cap_per_class;
  if (flags.label_column) cfg.schema.label_column = *flags.label_column;
  if (flags.label_map) cfg.schema.label_value_map = parse_label_map(*flags.label_map);
  if (flags.synth_spec) cfg.synth = parse_synth_spec(*flags.synth_spec, cfg.synth);

  // keep the derived streams in sync with any overridden master seed
  cfg.synth.seed = derive_seed(cfg.seed, 0x73796eULL);
  cfg.fed.seed = cfg.seed;
  cfg.fed.jobs = cfg.jobs;
  return cfg;
}

fs::path checkpoints_dir(const ExperimentConfig& cfg) {
  const fs::path dir = fs::path(cfg.out_dir) / "checkpoints";
  fs::create_directories(dir);
  return dir;
}

void print_warnings(const std::string& who, const AeTrainResult& history) {
  for (const std::string& warning : history.warnings)
    std::cerr << "warning: " << who << ": " << warning << "\n";
}

int cmd_ingest(const CommonFlags& flags, bool as_json) {
  ExperimentConfig cfg = build_config(flags);
  if (cfg.dataset_net.empty() && cfg.dataset_kernel.empty()) {
    std::cerr << "ingest needs --dataset-net and/or --dataset-kernel\n";
    return 2;
  }
  struct Source {
    std::string path;
    Modality modality;
  };
  std::vector<Source> sources;
  if (!cfg.dataset_net.empty())
    sources.push_back({cfg.dataset_net, Modality::NetworkTraffic});
  if (!cfg.dataset_kernel.empty())
    sources.push_back({cfg.dataset_kernel, Modality::KernelHpc});

  for (const Source& source : sources) {
    IngestReport report;
    ModalityDataset ds = load_csv(source.path, cfg.schema, source.modality, &report);
    ModalityDataset normalized = normalize(ds);
    (void)normalized;
    std::cout << (as_json ? report.to_json() : report.to_text()) << "\n";
  }
  return 0;
}

int cmd_synth(const CommonFlags& flags, const std::string& out_file) {
  ExperimentConfig cfg = build_config(flags);
  PairedDataset data = synth_generate(cfg.synth);
  save_paired_csv(out_file, data);
  std::cout << "wrote " << data.n() << " paired samples ("
            << data.net_dim() << " + " << data.kernel_dim() << " features) to "
            << out_file << "\n";
  return 0;
}

int cmd_train_ae(const CommonFlags& flags) {
  ExperimentConfig cfg = build_config(flags);
  if (cfg.out_dir.empty()) {
    std::cerr << "train-ae needs --out for the checkpoints\n";
    return 2;
  }
  PreparedData data = prepare_data(cfg);
  for (const IngestReport& report : data.ingest_reports)
    std::cout << report.to_text() << "\n";

  const AutoencoderConfig ae_cfg = cfg.ae;
  auto [net_ae, net_hist] =
      train_autoencoder(Modality::NetworkTraffic, data.train.net_features,
                        ae_cfg, derive_seed(cfg.seed, 0x6165ULL, 0));
  print_warnings("network autoencoder", net_hist);
  auto [kernel_ae, kernel_hist] =
      train_autoencoder(Modality::KernelHpc, data.train.kernel_features, ae_cfg,
                        derive_seed(cfg.seed, 0x6165ULL, 1));
  print_warnings("kernel autoencoder", kernel_hist);

  const fs::path dir = checkpoints_dir(cfg);
  save_checkpoint((dir / "ae_network.bin").string(), net_ae.to_checkpoint());
  save_checkpoint((dir / "ae_kernel.bin").string(), kernel_ae.to_checkpoint());
  {
    std::ofstream out(fs::path(cfg.out_dir) / "config.json");
    out << cfg.to_json() << "\n";
  }
  std::cout << "network AE final loss " << net_hist.loss_history.back()
            << ", kernel AE final loss " << kernel_hist.loss_history.back()
            << "\ncheckpoints written to " << dir.string() << "\n";
  return 0;
}

int cmd_train(const CommonFlags& flags) {
  ExperimentConfig cfg = build_config(flags);
  PreparedData data = prepare_data(cfg);
  for (const IngestReport& report : data.ingest_reports)
    std::cout << report.to_text() << "\n";

  TrainOutput out = run_training(cfg, data);
  print_warnings("network autoencoder", out.ae_history[0]);
  print_warnings("kernel autoencoder", out.ae_history[1]);

  ExperimentResult result;
  result.name = "train";
  result.rows.push_back({"centralized", out.metrics});
  write_run_artifacts(cfg, result);
  if (!cfg.out_dir.empty()) {
    const fs::path dir = checkpoints_dir(cfg);
    save_checkpoint((dir / "ae_network.bin").string(),
                    out.bundle.net_ae.to_checkpoint());
    save_checkpoint((dir / "ae_kernel.bin").string(),
                    out.bundle.kernel_ae.to_checkpoint());
    save_checkpoint((dir / "cnn.bin").string(), out.bundle.cnn.to_checkpoint());
  }
  std::cout << result.summary_grid();
  return 0;
}

int cmd_train_fed(const CommonFlags& flags) {
  ExperimentConfig cfg = build_config(flags);
  PreparedData data = prepare_data(cfg);
  for (const IngestReport& report : data.ingest_reports)
    std::cout << report.to_text() << "\n";

  FederatedDataPipeline pipe =
      build_federated_pipeline(cfg, data, cfg.fed.n_clients);
  CnnConfig arch = cfg.cnn;
  arch.input_len = 2 * kLatentDim;
  FederatedRun run = run_federated(cfg.fed, arch, pipe.client_train, pipe.pooled_test);

  ExperimentResult result;
  result.name = "train-fed";
  result.rows.push_back({"federated", evaluate_fused(run.model, pipe.pooled_test)});
  for (std::size_t id = 0; id < cfg.fed.n_clients; ++id) {
    result.rows.push_back(
        {"federated_client_" + std::to_string(id),
         evaluate_fused(run.model, pipe.client_test[id])});
  }
  result.rounds = std::move(run.rounds);
  write_run_artifacts(cfg, result);
  if (!cfg.out_dir.empty()) {
    const fs::path dir = checkpoints_dir(cfg);
    save_checkpoint((dir / "cnn_global.bin").string(), run.model.to_checkpoint());
    for (std::size_t id = 0; id < pipe.client_aes.size(); ++id) {
      const std::string tag = "client" + std::to_string(id);
      save_checkpoint((dir / (tag + "_ae_network.bin")).string(),
                      pipe.client_aes[id].first.to_checkpoint());
      save_checkpoint((dir / (tag + "_ae_kernel.bin")).string(),
                      pipe.client_aes[id].second.to_checkpoint());
    }
  }
  std::cout << result.summary_grid();
  return 0;
}

int cmd_eval(const CommonFlags& flags, const std::string& ckpt_dir,
             std::string ae_net_path, std::string ae_kernel_path,
             std::string cnn_path) {
  ExperimentConfig cfg = build_config(flags);
  if (!ckpt_dir.empty()) {
    if (ae_net_path.empty()) ae_net_path = (fs::path(ckpt_dir) / "ae_network.bin").string();
    if (ae_kernel_path.empty())
      ae_kernel_path = (fs::path(ckpt_dir) / "ae_kernel.bin").string();
    if (cnn_path.empty()) cnn_path = (fs::path(ckpt_dir) / "cnn.bin").string();
  }

  ModelBundle bundle{
      Autoencoder::from_checkpoint(load_checkpoint(ae_net_path)),
      Autoencoder::from_checkpoint(load_checkpoint(ae_kernel_path)),
      CnnModel::from_checkpoint(load_checkpoint(cnn_path))};

  PreparedData data = prepare_data(cfg);
  MetricsReport report = evaluate(bundle, data.test);

  ExperimentResult result;
  result.name = "eval";
  result.rows.push_back({"eval", report});
  write_run_artifacts(cfg, result);
  std::cout << result.summary_grid();
  std::cout << report.to_json() << "\n";
  return 0;
}

int cmd_experiment(const CommonFlags& flags, const std::string& name) {
  ExperimentConfig cfg = build_config(flags);
  ExperimentResult result;
  if (name == "fusion-vs-single") {
    result = experiment_fusion_vs_single(cfg);
  } else if (name == "centralized-vs-federated") {
    result = experiment_centralized_vs_federated(cfg);
  } else if (name == "client-sweep") {
    result = experiment_client_sweep(cfg);
  } else {
    std::cerr << "unknown experiment '" << name
              << "' (expected fusion-vs-single, centralized-vs-federated, "
                 "client-sweep)\n";
    return 2;
  }
  write_run_artifacts(cfg, result);
  std::cout << result.summary_grid();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated multimodal intrusion detection for EV charging stations"};
  app.require_subcommand(1);

  CommonFlags flags;
  bool ingest_json = false;
  std::string synth_out;
  std::string experiment_name;
  std::string ckpt_dir, ckpt_ae_net, ckpt_ae_kernel, ckpt_cnn;

  CLI::App* ingest = app.add_subcommand("ingest", "Load CSVs and report counts");
  add_common_flags(ingest, flags);
  ingest->add_flag("--json", ingest_json, "Emit the report as JSON");

  CLI::App* synth = app.add_subcommand("synth", "Generate a paired synthetic CSV");
  add_common_flags(synth, flags);
  synth->add_option("--out-file", synth_out, "Paired CSV to write")->required();

  CLI::App* train_ae =
      app.add_subcommand("train-ae", "Train the two modality autoencoders");
  add_common_flags(train_ae, flags);

  CLI::App* train =
      app.add_subcommand("train", "Centralized pipeline: AEs + fused classifier");
  add_common_flags(train, flags);

  CLI::App* train_fed =
      app.add_subcommand("train-fed", "Simulated federated training");
  add_common_flags(train_fed, flags);

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate saved checkpoints on a dataset");
  add_common_flags(eval_cmd, flags);
  eval_cmd->add_option("--ckpt-dir", ckpt_dir,
                       "Directory holding ae_network.bin, ae_kernel.bin, cnn.bin");
  eval_cmd->add_option("--ckpt-ae-net", ckpt_ae_net, "Network AE checkpoint");
  eval_cmd->add_option("--ckpt-ae-kernel", ckpt_ae_kernel, "Kernel AE checkpoint");
  eval_cmd->add_option("--ckpt-cnn", ckpt_cnn, "Classifier checkpoint");

  CLI::App* experiment = app.add_subcommand(
      "experiment", "Run a full comparison protocol and write its tables");
  add_common_flags(experiment, flags);
  experiment
      ->add_option("--name", experiment_name,
                   "fusion-vs-single | centralized-vs-federated | client-sweep")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(flags, ingest_json);
    if (synth->parsed()) return cmd_synth(flags, synth_out);
    if (train_ae->parsed()) return cmd_train_ae(flags);
    if (train->parsed()) return cmd_train(flags);
    if (train_fed->parsed()) return cmd_train_fed(flags);
    if (eval_cmd->parsed()) {
      if (ckpt_dir.empty() &&
          (ckpt_ae_net.empty() || ckpt_ae_kernel.empty() || ckpt_cnn.empty())) {
        std::cerr << "eval needs --ckpt-dir or all of --ckpt-ae-net, "
                     "--ckpt-ae-kernel, --ckpt-cnn\n";
        return 2;
      }
      return cmd_eval(flags, ckpt_dir, ckpt_ae_net, ckpt_ae_kernel, ckpt_cnn);
    }
    if (experiment->parsed()) return cmd_experiment(flags, experiment_name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
