#pragma once

#include <array>
#include <string>
#include <vector>

#include "evsefl/autoencoder.hpp"
#include "evsefl/cnn.hpp"
#include "evsefl/dataset.hpp"

namespace evsefl {

/// 3x3 counts, rows = true class, columns = predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  std::size_t total() const;
  std::size_t trace() const;
  void add(int y_true, int y_pred);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred);

struct ClassMetrics {
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;        // one-vs-rest
  std::size_t support = 0;
  bool degenerate = false;  // class absent from y_true, metrics forced to 0
};

/// All values in percent. precision/recall/f1 come in support-weighted and
/// macro variants; fpr_binary is the share of benign samples predicted as
/// any attack class. 0/0 ratios resolve to 0 with the degeneracy flag set.
struct MetricsReport {
  double accuracy = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  double fpr_binary = 0.0;
  std::array<ClassMetrics, kNumClasses> per_class{};
  std::size_t total = 0;

  std::string to_json() const;
  /// CSV columns, fixed order, percentages with 2 decimals.
  static std::string csv_header();
  std::string csv_row(const std::string& scope) const;
};

MetricsReport compute_metrics(const ConfusionMatrix& cm);

/// The trained centralized pipeline: one autoencoder per modality plus the
/// fused classifier.
struct ModelBundle {
  Autoencoder net_ae;
  Autoencoder kernel_ae;
  CnnModel cnn;
};

/// encode -> fuse -> predict -> metrics over the full test set.
/// The test set must already be normalized with train-split statistics.
MetricsReport evaluate(const ModelBundle& bundle, const PairedDataset& test);

/// Same pipeline restricted to each client's local test slice.
std::vector<MetricsReport> evaluate_per_client(
    const ModelBundle& bundle, const PairedDataset& test,
    const std::vector<ClientShard>& slices);

/// Metrics of an already-encoded test set under a classifier.
MetricsReport evaluate_fused(const CnnModel& model, const FusedDataset& test);

}  // namespace evsefl
