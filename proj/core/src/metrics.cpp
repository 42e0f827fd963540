#include "evsefl/metrics.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evsefl/errors.hpp"

namespace evsefl {

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (std::size_t c : row) n += c;
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (int c = 0; c < kNumClasses; ++c) n += counts[c][c];
  return n;
}

void ConfusionMatrix::add(int y_true, int y_pred) {
  if (y_true < 0 || y_true >= kNumClasses || y_pred < 0 || y_pred >= kNumClasses) {
    std::ostringstream msg;
    msg << "label pair (" << y_true << ", " << y_pred << ") outside [0, "
        << kNumClasses << ")";
    throw DataError(msg.str());
  }
  counts[static_cast<std::size_t>(y_true)][static_cast<std::size_t>(y_pred)] += 1;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int t = 0; t < kNumClasses; ++t)
    for (int p = 0; p < kNumClasses; ++p) counts[t][p] += other.counts[t][p];
  return *this;
}

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    std::ostringstream msg;
    msg << "confusion: " << y_true.size() << " true labels vs "
        << y_pred.size() << " predictions";
    throw DataError(msg.str());
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) cm.add(y_true[i], y_pred[i]);
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw EvalError("cannot compute metrics of an empty matrix");

  MetricsReport report;
  report.total = total;
  report.accuracy = 100.0 * static_cast<double>(cm.trace()) /
                    static_cast<double>(total);

  for (int c = 0; c < kNumClasses; ++c) {
    const std::size_t tp = cm.counts[c][c];
    std::size_t fp = 0, fn = 0, support = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      if (k != c) {
        fp += cm.counts[k][c];
        fn += cm.counts[c][k];
      }
      support += cm.counts[c][k];
    }
    const std::size_t tn = total - tp - fp - fn;

    ClassMetrics& m = report.per_class[c];
    m.support = support;
    m.degenerate = support == 0;
    m.precision = (tp + fp) == 0 ? 0.0
                                 : 100.0 * static_cast<double>(tp) /
                                       static_cast<double>(tp + fp);
    m.recall = support == 0 ? 0.0
                            : 100.0 * static_cast<double>(tp) /
                                  static_cast<double>(tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.fpr = (fp + tn) == 0 ? 0.0
                           : 100.0 * static_cast<double>(fp) /
                                 static_cast<double>(fp + tn);
  }

  for (int c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = report.per_class[c];
    const double w = static_cast<double>(m.support) / static_cast<double>(total);
    report.precision_weighted += w * m.precision;
    report.recall_weighted += w * m.recall;
    report.f1_weighted += w * m.f1;
    report.precision_macro += m.precision / kNumClasses;
    report.recall_macro += m.recall / kNumClasses;
    report.f1_macro += m.f1 / kNumClasses;
  }

  // Binary false positive rate: benign rows predicted as any attack class.
  const std::size_t benign = report.per_class[0].support;
  if (benign > 0) {
    const std::size_t benign_as_attack = cm.counts[0][1] + cm.counts[0][2];
    report.fpr_binary = 100.0 * static_cast<double>(benign_as_attack) /
                        static_cast<double>(benign);
  }
  return report;
}

namespace {
std::string format2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}
}  // namespace

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["accuracy"] = accuracy;
  j["precision_weighted"] = precision_weighted;
  j["recall_weighted"] = recall_weighted;
  j["f1_weighted"] = f1_weighted;
  j["precision_macro"] = precision_macro;
  j["recall_macro"] = recall_macro;
  j["f1_macro"] = f1_macro;
  j["fpr_binary"] = fpr_binary;
  j["total"] = total;
  const char* names[kNumClasses] = {"benign", "dos", "recon"};
  for (int c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = per_class[c];
    j["per_class"][names[c]] = {{"precision", m.precision},
                                {"recall", m.recall},
                                {"f1", m.f1},
                                {"fpr", m.fpr},
                                {"support", m.support},
                                {"degenerate", m.degenerate}};
  }
  return j.dump(2);
}

std::string MetricsReport::csv_header() {
  std::string header =
      "scope,accuracy,precision_weighted,recall_weighted,f1_weighted,"
      "precision_macro,recall_macro,f1_macro,fpr_binary,total";
  const char* names[kNumClasses] = {"benign", "dos", "recon"};
  for (int c = 0; c < kNumClasses; ++c) {
    for (const char* metric : {"precision", "recall", "f1", "fpr"}) {
      header += ",";
      header += names[c];
      header += "_";
      header += metric;
    }
  }
  return header;
}

std::string MetricsReport::csv_row(const std::string& scope) const {
  std::ostringstream row;
  row << scope << "," << format2(accuracy) << "," << format2(precision_weighted)
      << "," << format2(recall_weighted) << "," << format2(f1_weighted) << ","
      << format2(precision_macro) << "," << format2(recall_macro) << ","
      << format2(f1_macro) << "," << format2(fpr_binary) << "," << total;
  for (int c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = per_class[c];
    row << "," << format2(m.precision) << "," << format2(m.recall) << ","
        << format2(m.f1) << "," << format2(m.fpr);
  }
  return row.str();
}

MetricsReport evaluate(const ModelBundle& bundle, const PairedDataset& test) {
  if (test.n() == 0) throw EvalError("evaluate called with an empty test set");
  if (test.net_dim() == 0 || test.kernel_dim() == 0)
    throw EvalError("evaluate requires both modalities in the test set");
  const FusedDataset fused = encode_and_fuse(bundle.net_ae, bundle.kernel_ae, test);
  return evaluate_fused(bundle.cnn, fused);
}

std::vector<MetricsReport> evaluate_per_client(
    const ModelBundle& bundle, const PairedDataset& test,
    const std::vector<ClientShard>& slices) {
  std::vector<MetricsReport> reports;
  reports.reserve(slices.size());
  for (const ClientShard& shard : slices)
    reports.push_back(evaluate(bundle, subset(test, shard.indices)));
  return reports;
}

MetricsReport evaluate_fused(const CnnModel& model, const FusedDataset& test) {
  if (test.n() == 0) throw EvalError("evaluate called with an empty test set");
  const std::vector<int> predicted = model.predict(test.features);
  return compute_metrics(confusion(test.labels, predicted));
}

}  // namespace evsefl
