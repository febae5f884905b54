#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qsent/dimred.hpp"
#include "qsent/featmap.hpp"
#include "qsent/qml.hpp"
#include "qsent/svm.hpp"
#include "qsent/textprep.hpp"
#include "qsent/types.hpp"

namespace qsent::pipeline {

// Reads a UTF-8 CSV with a `text,label` header (either column order).
// Quoted fields may contain commas, quotes and newlines. Errors carry line
// numbers.
std::vector<textprep::Document>
load_dataset(const std::filesystem::path &path);

struct Split {
    std::vector<textprep::Document> train;
    std::vector<textprep::Document> test;
};

// Seeded shuffle, then a per-class (stratified) split. Throws DataError if
// either side of any class would be empty at the requested ratio.
Split train_test_split(const std::vector<textprep::Document> &docs,
                       double ratio, std::uint32_t seed);

// Per-feature min-max map onto [lo, hi], fitted on the training split.
// Transformed values are clamped to the target range; features that are
// constant in training map to lo.
struct MinMaxScaler {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
    double lo = 0.0;
    double hi = 2.0 * 3.14159265358979323846;

    void fit(const FeatureMatrix &X);
    FeatureMatrix transform(const FeatureMatrix &X) const;

    nlohmann::json to_json() const;
    static MinMaxScaler from_json(const nlohmann::json &j);
};

enum class ClassifierKind { ClassicalSvm, QKernelSvm, Vqc };
const char *classifier_name(ClassifierKind kind);
ClassifierKind classifier_from_name(const std::string &name);

struct ExperimentConfig {
    std::filesystem::path dataset;
    std::string language = "english"; // english | bengali
    std::filesystem::path stopwords;  // optional; empty = no stop-word removal
    double split_ratio = 0.8;
    std::uint32_t seed = 42;
    int pca_k = 0; // 0 = no PCA
    int haar_levels = 0;
    ClassifierKind classifier = ClassifierKind::ClassicalSvm;
    featmap::FeatureMapConfig map;
    svm::SvmConfig svm;
    qml::VqcConfig vqc;

    // Throws ConfigError on contradictions (e.g. Haar without PCA).
    void validate() const;
};

struct ConfusionCounts {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    long total() const { return tp + fp + tn + fn; }
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0; // class 1 positive
    double recall = 0.0;
    double f1 = 0.0;
    ConfusionCounts counts;
};

// Zero-denominator conventions: precision 0 with no positive predictions,
// recall 0 with no positive truths, F1 0 when precision+recall is 0.
Metrics compute_metrics(const Labels &y_true, const Labels &y_pred);

// Which split each fitted stage saw; the no-leakage tests assert these all
// equal the training-row count.
struct FitProvenance {
    long vocabulary_rows = 0;
    long pca_rows = 0;
    long scaler_rows = 0;
};

struct MetricsReport {
    std::string method;
    int pca_k = 0;
    int haar_levels = 0;
    Metrics train;
    Metrics test;
    double train_time_s = 0.0;
    long discarded_docs = 0; // empty after cleaning
    long truncated_rows = 0; // dropped by Haar blocking
    long train_rows = 0;
    long test_rows = 0;
    bool converged = true;
    FitProvenance provenance;

    nlohmann::json to_json() const;
    static MetricsReport from_json(const nlohmann::json &j);
};

MetricsReport run_experiment(const ExperimentConfig &cfg);

// Everything needed to classify new text with a fitted pipeline: cleaning
// language, stop words, vocabulary, label mapping, reduction/scaling state
// and the trained classifier. Serializable so `train` and `evaluate` can be
// separate CLI invocations.
struct ModelBundle {
    std::string language;
    std::vector<std::string> stopword_terms;
    std::vector<std::string> vocabulary_terms;
    std::map<std::string, int> class_bits;
    int pca_k = 0;
    std::optional<dimred::PcaModel> pca;
    MinMaxScaler scaler;
    ClassifierKind classifier = ClassifierKind::ClassicalSvm;
    featmap::FeatureMapConfig map; // effective qubit count after reduction
    std::optional<svm::SvmModel> svm_model;
    std::optional<qml::VqcModel> vqc_model;
    FeatureMatrix support_features; // qkernel: scaled support rows
    MetricsReport train_report;     // metrics of the fitting run

    // Raw documents -> scaled feature rows, applying the stored
    // preprocessing. Documents empty after cleaning are dropped and counted.
    FeatureMatrix features_of(const std::vector<textprep::Document> &docs,
                              Labels *labels_out, long *discarded_out) const;
    Labels predict(const FeatureMatrix &X) const;

    nlohmann::json to_json() const;
    static ModelBundle from_json(const nlohmann::json &j);
    void save(const std::filesystem::path &path) const;
    static ModelBundle load(const std::filesystem::path &path);
};

// Fits the full pipeline described by `cfg`; the returned bundle carries
// its own held-out metrics as train_report.
ModelBundle fit_pipeline(const ExperimentConfig &cfg);

// Applies a fitted bundle to a dataset treated as an evaluation split. The
// returned report keeps the stored training metrics/time and replaces the
// test metrics.
MetricsReport evaluate_bundle(const ModelBundle &bundle,
                              const std::vector<textprep::Document> &docs);

// CSV columns: method,pca_k,haar_levels,train_acc,test_acc,precision,
// recall,f1,train_time_s — one row per report, in input order. Emission is
// byte-stable for identical reports.
std::string report_csv(const std::vector<MetricsReport> &reports);
void emit_report_csv(const std::vector<MetricsReport> &reports,
                     const std::filesystem::path &path);
void emit_report_json(const std::vector<MetricsReport> &reports,
                      const std::filesystem::path &path);

} // namespace qsent::pipeline
