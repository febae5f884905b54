#include "qsent/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "qsent/dimred.hpp"
#include "qsent/errors.hpp"

namespace qsent::pipeline {

namespace {

// Structural UTF-8 validation; returns the 1-based line of the first bad
// byte, or 0 when the buffer is valid.
std::size_t find_invalid_utf8_line(std::string_view s) {
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char b = s[i];
        if (b == '\n')
            ++line;
        std::size_t len;
        if (b < 0x80)
            len = 1;
        else if ((b & 0xE0) == 0xC0)
            len = 2;
        else if ((b & 0xF0) == 0xE0)
            len = 3;
        else if ((b & 0xF8) == 0xF0)
            len = 4;
        else
            return line;
        if (i + len > s.size())
            return line;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80)
                return line;
        i += len;
    }
    return 0;
}

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line the record starts on
};

std::vector<CsvRecord> parse_csv(std::string_view content,
                                 const std::string &source) {
    std::vector<CsvRecord> records;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < content.size()) {
        CsvRecord rec;
        rec.line = line;
        std::string field;
        bool quoted = false;
        bool done = false;
        while (!done) {
            if (i >= content.size()) {
                if (quoted)
                    throw DataError(source + ":" + std::to_string(rec.line) +
                                    ": unterminated quoted field");
                rec.fields.push_back(std::move(field));
                break;
            }
            const char c = content[i++];
            if (quoted) {
                if (c == '"') {
                    if (i < content.size() && content[i] == '"') {
                        field += '"';
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n')
                        ++line;
                    field += c;
                }
            } else if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == ',') {
                rec.fields.push_back(std::move(field));
                field.clear();
            } else if (c == '\n') {
                if (!field.empty() && field.back() == '\r')
                    field.pop_back();
                rec.fields.push_back(std::move(field));
                ++line;
                done = true;
            } else {
                field += c;
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace

std::vector<textprep::Document>
load_dataset(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open dataset: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();
    const std::string source = path.filename().string();

    if (content.empty())
        throw DataError(source + ": dataset file is empty");
    if (const std::size_t bad = find_invalid_utf8_line(content))
        throw DataError(source + ":" + std::to_string(bad) +
                        ": invalid UTF-8 byte sequence");

    const auto records = parse_csv(content, source);
    if (records.empty())
        throw DataError(source + ": no CSV records");

    const auto &header = records.front().fields;
    int text_col = -1, label_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "text")
            text_col = int(c);
        else if (header[c] == "label")
            label_col = int(c);
    }
    if (text_col < 0 || label_col < 0) {
        std::string got;
        for (const auto &h : header)
            got += (got.empty() ? "" : ",") + h;
        throw DataError(source + ":1: header must name text and label columns, got '" +
                        got + "'");
    }

    std::vector<textprep::Document> docs;
    docs.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto &rec = records[r];
        if (rec.fields.size() == 1 && rec.fields[0].empty())
            continue; // trailing blank line
        const std::size_t need =
            std::size_t(std::max(text_col, label_col)) + 1;
        if (rec.fields.size() < need)
            throw DataError(source + ":" + std::to_string(rec.line) +
                            ": expected " + std::to_string(header.size()) +
                            " columns, got " +
                            std::to_string(rec.fields.size()));
        docs.push_back({rec.fields[std::size_t(text_col)],
                        rec.fields[std::size_t(label_col)]});
    }
    if (docs.empty())
        throw DataError(source + ": dataset has a header but no rows");
    return docs;
}

Split train_test_split(const std::vector<textprep::Document> &docs,
                       double ratio, std::uint32_t seed) {
    if (ratio <= 0.0 || ratio >= 1.0)
        throw std::invalid_argument("split ratio must be in (0,1)");

    // Hand-rolled Fisher-Yates; std::shuffle is not portable across
    // standard libraries.
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
        order[i] = i;
    std::mt19937 rng(seed);
    for (std::size_t i = docs.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng() % i]);

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i : order)
        by_class[docs[i].label].push_back(i);

    Split split;
    for (const auto &[label, idx] : by_class) {
        if (idx.size() < 2)
            throw DataError("class '" + label + "' has fewer than 2 rows");
        const auto n_train = std::size_t(std::llround(ratio * double(idx.size())));
        if (n_train == 0 || n_train == idx.size())
            throw DataError("class '" + label +
                            "' would be absent from one side at ratio " +
                            std::to_string(ratio));
        for (std::size_t k = 0; k < idx.size(); ++k)
            (k < n_train ? split.train : split.test).push_back(docs[idx[k]]);
    }
    return split;
}

void MinMaxScaler::fit(const FeatureMatrix &X) {
    if (X.rows() == 0)
        throw std::invalid_argument("MinMaxScaler: empty fit matrix");
    min = X.colwise().minCoeff();
    max = X.colwise().maxCoeff();
}

FeatureMatrix MinMaxScaler::transform(const FeatureMatrix &X) const {
    if (X.cols() != min.size())
        throw std::invalid_argument("MinMaxScaler: feature count mismatch");
    FeatureMatrix out(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double span = max[c] - min[c];
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            double v = span > 0.0
                           ? lo + (hi - lo) * (X(r, c) - min[c]) / span
                           : lo;
            out(r, c) = std::clamp(v, lo, hi);
        }
    }
    return out;
}

nlohmann::json MinMaxScaler::to_json() const {
    return {{"min", std::vector<double>(min.begin(), min.end())},
            {"max", std::vector<double>(max.begin(), max.end())},
            {"lo", lo},
            {"hi", hi}};
}

MinMaxScaler MinMaxScaler::from_json(const nlohmann::json &j) {
    MinMaxScaler s;
    const auto mn = j.at("min").get<std::vector<double>>();
    const auto mx = j.at("max").get<std::vector<double>>();
    s.min = Eigen::Map<const Eigen::VectorXd>(mn.data(), Eigen::Index(mn.size()));
    s.max = Eigen::Map<const Eigen::VectorXd>(mx.data(), Eigen::Index(mx.size()));
    s.lo = j.at("lo").get<double>();
    s.hi = j.at("hi").get<double>();
    return s;
}

const char *classifier_name(ClassifierKind kind) {
    switch (kind) {
    case ClassifierKind::ClassicalSvm:
        return "classical_svm";
    case ClassifierKind::QKernelSvm:
        return "qkernel_svm";
    case ClassifierKind::Vqc:
        return "vqc";
    }
    return "?";
}

ClassifierKind classifier_from_name(const std::string &name) {
    if (name == "classical_svm")
        return ClassifierKind::ClassicalSvm;
    if (name == "qkernel_svm")
        return ClassifierKind::QKernelSvm;
    if (name == "vqc")
        return ClassifierKind::Vqc;
    throw ConfigError("unknown classifier: " + name +
                      " (expected classical_svm, qkernel_svm or vqc)");
}

void ExperimentConfig::validate() const {
    if (split_ratio <= 0.0 || split_ratio >= 1.0)
        throw ConfigError("split ratio must be in (0,1)");
    if (pca_k != 0 && pca_k != 2 && pca_k != 4 && pca_k != 6)
        throw ConfigError("pca_k must be one of 0 (off), 2, 4, 6");
    if (haar_levels < 0 || haar_levels > 5)
        throw ConfigError("haar_levels must be in 0..5");
    if (haar_levels > 0 && pca_k == 0)
        throw ConfigError("haar_levels > 0 requires PCA (set pca_k first)");
    if (language != "english" && language != "bengali")
        throw ConfigError("language must be english or bengali");
    if (map.reps < 1)
        throw ConfigError("feature map repetitions must be >= 1");
}

Metrics compute_metrics(const Labels &y_true, const Labels &y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("compute_metrics: length mismatch");
    Metrics m;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool truth = y_true[i] == 1;
        const bool pred = y_pred[i] == 1;
        if (truth && pred)
            ++m.counts.tp;
        else if (!truth && pred)
            ++m.counts.fp;
        else if (!truth && !pred)
            ++m.counts.tn;
        else
            ++m.counts.fn;
    }
    const long total = m.counts.total();
    m.accuracy = total ? double(m.counts.tp + m.counts.tn) / double(total) : 0.0;
    const long pred_pos = m.counts.tp + m.counts.fp;
    const long true_pos = m.counts.tp + m.counts.fn;
    m.precision = pred_pos ? double(m.counts.tp) / double(pred_pos) : 0.0;
    m.recall = true_pos ? double(m.counts.tp) / double(true_pos) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

namespace {

// Wraps stage failures with the stage name and a config echo; ConfigError
// keeps its type so the CLI can map exit codes.
template <typename Fn>
auto run_stage(const ExperimentConfig &cfg, const char *name, Fn &&fn) {
    try {
        return fn();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw DataError(std::string("stage '") + name + "' failed for " +
                        classifier_name(cfg.classifier) +
                        " (pca_k=" + std::to_string(cfg.pca_k) +
                        ", haar_levels=" + std::to_string(cfg.haar_levels) +
                        "): " + e.what());
    }
}

struct CleanedCorpus {
    std::vector<textprep::Document> docs; // cleaned text, original labels
    long discarded = 0;
};

CleanedCorpus clean_corpus(const std::vector<textprep::Document> &raw) {
    const textprep::TextCleaner cleaner = textprep::TextCleaner::defaults();
    CleanedCorpus out;
    for (const auto &doc : raw) {
        std::string cleaned = cleaner.clean(doc.text);
        if (cleaned.empty()) {
            ++out.discarded; // zero-vector rows destabilize PCA centering
            continue;
        }
        out.docs.push_back({std::move(cleaned), doc.label});
    }
    return out;
}

std::vector<std::vector<std::string>>
tokens_of(const std::vector<textprep::Document> &docs,
          const textprep::StopWordSet &stops) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(docs.size());
    for (const auto &d : docs)
        tokens.push_back(
            textprep::remove_stopwords(textprep::tokenize(d.text), stops));
    return tokens;
}

} // namespace

ModelBundle fit_pipeline(const ExperimentConfig &cfg) {
    cfg.validate();

    ModelBundle bundle;
    bundle.language = cfg.language;
    bundle.classifier = cfg.classifier;
    bundle.pca_k = cfg.pca_k;

    MetricsReport report;
    report.method = classifier_name(cfg.classifier);
    report.pca_k = cfg.pca_k;
    report.haar_levels = cfg.haar_levels;

    // --- preprocess: clean, encode labels, split, tokenize, vectorize ---
    FeatureMatrix X_train, X_test;
    Labels y_train, y_test;
    run_stage(cfg, "preprocess", [&] {
        const auto raw = load_dataset(cfg.dataset);
        CleanedCorpus cleaned = clean_corpus(raw);
        if (cleaned.docs.empty())
            throw DataError("every document was discarded during cleaning");
        report.discarded_docs = cleaned.discarded;

        std::vector<std::string> labels;
        labels.reserve(cleaned.docs.size());
        for (const auto &d : cleaned.docs)
            labels.push_back(d.label);
        bundle.class_bits = textprep::encode_labels(labels).class_bits;

        textprep::StopWordSet stops;
        if (!cfg.stopwords.empty())
            stops = textprep::StopWordSet::load(cfg.stopwords);
        bundle.stopword_terms = stops.terms();

        const Split split =
            train_test_split(cleaned.docs, cfg.split_ratio, cfg.seed);
        const auto train_tokens = tokens_of(split.train, stops);
        const auto test_tokens = tokens_of(split.test, stops);

        // Vocabulary is fitted on the training split only.
        const auto vocab = textprep::Vocabulary::build(train_tokens);
        bundle.vocabulary_terms = vocab.terms();
        report.provenance.vocabulary_rows = long(split.train.size());

        X_train = textprep::vectorize_corpus(train_tokens, vocab);
        X_test = textprep::vectorize_corpus(test_tokens, vocab);
        for (const auto &d : split.train)
            y_train.push_back(bundle.class_bits.at(d.label));
        for (const auto &d : split.test)
            y_test.push_back(bundle.class_bits.at(d.label));
        return 0;
    });

    // --- reduce and scale (fit on train, apply to both) ---
    if (cfg.pca_k > 0) {
        run_stage(cfg, "pca", [&] {
            bundle.pca = dimred::pca_fit(X_train);
            if (cfg.pca_k > bundle.pca->n_components())
                throw DataError("pca_k exceeds available components");
            X_train = dimred::pca_transform(*bundle.pca, X_train, cfg.pca_k);
            X_test = dimred::pca_transform(*bundle.pca, X_test, cfg.pca_k);
            return 0;
        });
    }
    report.provenance.pca_rows = long(y_train.size());

    run_stage(cfg, "scale", [&] {
        bundle.scaler.fit(X_train);
        X_train = bundle.scaler.transform(X_train);
        X_test = bundle.scaler.transform(X_test);
        return 0;
    });
    report.provenance.scaler_rows = long(y_train.size());

    // --- optional Haar compression of the training split only ---
    if (cfg.haar_levels > 0) {
        run_stage(cfg, "haar", [&] {
            auto compressed =
                dimred::haar_compress_dataset(X_train, y_train, cfg.haar_levels);
            X_train = std::move(compressed.X);
            y_train = std::move(compressed.y);
            report.truncated_rows = compressed.truncated_rows;
            return 0;
        });
    }
    report.train_rows = long(y_train.size());
    report.test_rows = long(y_test.size());

    bundle.map = cfg.map;
    bundle.map.n_qubits = int(X_train.cols());
    if (cfg.classifier != ClassifierKind::ClassicalSvm &&
        bundle.map.n_qubits > 16)
        throw ConfigError(std::string(classifier_name(cfg.classifier)) + ": " +
                          std::to_string(bundle.map.n_qubits) +
                          " features is too wide to simulate; reduce with "
                          "pca_k");

    // --- train (wall time covers classifier training, including kernel
    // construction for the kernel method) ---
    const auto t0 = std::chrono::steady_clock::now();
    switch (cfg.classifier) {
    case ClassifierKind::ClassicalSvm: {
        bundle.svm_model = run_stage(cfg, "train", [&] {
            return svm::SvmModel::train_linear(X_train, y_train, cfg.svm);
        });
        report.converged = bundle.svm_model->converged();
        break;
    }
    case ClassifierKind::QKernelSvm: {
        const Eigen::MatrixXd K_train = run_stage(cfg, "kernel", [&] {
            return qml::quantum_kernel_matrix(X_train, bundle.map);
        });
        bundle.svm_model = run_stage(cfg, "train", [&] {
            return svm::SvmModel::train_precomputed(K_train, y_train, cfg.svm);
        });
        report.converged = bundle.svm_model->converged();
        const auto &support = bundle.svm_model->support_indices();
        bundle.support_features.resize(Eigen::Index(support.size()),
                                       X_train.cols());
        for (std::size_t s = 0; s < support.size(); ++s)
            bundle.support_features.row(Eigen::Index(s)) =
                X_train.row(support[s]);
        break;
    }
    case ClassifierKind::Vqc: {
        qml::VqcConfig vqc = cfg.vqc;
        vqc.map = bundle.map;
        bundle.vqc_model = run_stage(
            cfg, "train", [&] { return qml::vqc_train(X_train, y_train, vqc); });
        break;
    }
    }
    report.train_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const Labels pred_train = run_stage(
        cfg, "evaluate-train", [&] { return bundle.predict(X_train); });
    const Labels pred_test = run_stage(
        cfg, "evaluate-test", [&] { return bundle.predict(X_test); });
    report.train = compute_metrics(y_train, pred_train);
    report.test = compute_metrics(y_test, pred_test);

    bundle.train_report = std::move(report);
    return bundle;
}

MetricsReport run_experiment(const ExperimentConfig &cfg) {
    return fit_pipeline(cfg).train_report;
}

FeatureMatrix
ModelBundle::features_of(const std::vector<textprep::Document> &docs,
                         Labels *labels_out, long *discarded_out) const {
    CleanedCorpus cleaned = clean_corpus(docs);
    if (discarded_out)
        *discarded_out = cleaned.discarded;
    if (cleaned.docs.empty())
        throw DataError("every document was discarded during cleaning");

    if (labels_out) {
        labels_out->clear();
        for (const auto &d : cleaned.docs) {
            const auto it = class_bits.find(d.label);
            if (it == class_bits.end())
                throw DataError("label '" + d.label +
                                "' was not seen during training");
            labels_out->push_back(it->second);
        }
    }

    const auto stops = textprep::StopWordSet::from_terms(stopword_terms);
    const auto vocab = textprep::Vocabulary::from_terms(vocabulary_terms);
    FeatureMatrix X =
        textprep::vectorize_corpus(tokens_of(cleaned.docs, stops), vocab);
    if (pca) {
        if (pca_k > pca->n_components())
            throw DataError("stored pca_k exceeds stored components");
        X = dimred::pca_transform(*pca, X, pca_k);
    }
    return scaler.transform(X);
}

Labels ModelBundle::predict(const FeatureMatrix &X) const {
    Labels out(std::size_t(X.rows()));
    switch (classifier) {
    case ClassifierKind::ClassicalSvm: {
        if (!svm_model)
            throw DataError("bundle has no SVM model");
        for (Eigen::Index r = 0; r < X.rows(); ++r)
            out[std::size_t(r)] = svm_model->predict(X.row(r).transpose());
        break;
    }
    case ClassifierKind::QKernelSvm: {
        if (!svm_model)
            throw DataError("bundle has no SVM model");
        const Eigen::MatrixXd K =
            qml::quantum_kernel_matrix(X, support_features, map);
        for (Eigen::Index r = 0; r < X.rows(); ++r)
            out[std::size_t(r)] = svm_model->predict_row(K.row(r).transpose());
        break;
    }
    case ClassifierKind::Vqc: {
        if (!vqc_model)
            throw DataError("bundle has no VQC model");
        for (Eigen::Index r = 0; r < X.rows(); ++r)
            out[std::size_t(r)] = vqc_model->predict(X.row(r).transpose());
        break;
    }
    }
    return out;
}

MetricsReport evaluate_bundle(const ModelBundle &bundle,
                              const std::vector<textprep::Document> &docs) {
    Labels y_true;
    long discarded = 0;
    const FeatureMatrix X = bundle.features_of(docs, &y_true, &discarded);
    const Labels y_pred = bundle.predict(X);

    MetricsReport report = bundle.train_report;
    report.test = compute_metrics(y_true, y_pred);
    report.test_rows = long(y_true.size());
    report.discarded_docs = discarded;
    return report;
}

namespace {

nlohmann::json metrics_to_json(const Metrics &m) {
    return {{"accuracy", m.accuracy}, {"precision", m.precision},
            {"recall", m.recall},     {"f1", m.f1},
            {"tp", m.counts.tp},      {"fp", m.counts.fp},
            {"tn", m.counts.tn},      {"fn", m.counts.fn}};
}

Metrics metrics_from_json(const nlohmann::json &j) {
    Metrics m;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.counts.tp = j.at("tp").get<long>();
    m.counts.fp = j.at("fp").get<long>();
    m.counts.tn = j.at("tn").get<long>();
    m.counts.fn = j.at("fn").get<long>();
    return m;
}

} // namespace

nlohmann::json MetricsReport::to_json() const {
    return {{"method", method},
            {"pca_k", pca_k},
            {"haar_levels", haar_levels},
            {"train", metrics_to_json(train)},
            {"test", metrics_to_json(test)},
            {"train_time_s", train_time_s},
            {"discarded_docs", discarded_docs},
            {"truncated_rows", truncated_rows},
            {"train_rows", train_rows},
            {"test_rows", test_rows},
            {"converged", converged},
            {"fit_rows",
             {{"vocabulary", provenance.vocabulary_rows},
              {"pca", provenance.pca_rows},
              {"scaler", provenance.scaler_rows}}}};
}

MetricsReport MetricsReport::from_json(const nlohmann::json &j) {
    MetricsReport r;
    r.method = j.at("method").get<std::string>();
    r.pca_k = j.at("pca_k").get<int>();
    r.haar_levels = j.at("haar_levels").get<int>();
    r.train = metrics_from_json(j.at("train"));
    r.test = metrics_from_json(j.at("test"));
    r.train_time_s = j.at("train_time_s").get<double>();
    r.discarded_docs = j.at("discarded_docs").get<long>();
    r.truncated_rows = j.at("truncated_rows").get<long>();
    r.train_rows = j.at("train_rows").get<long>();
    r.test_rows = j.at("test_rows").get<long>();
    r.converged = j.at("converged").get<bool>();
    const auto &fit = j.at("fit_rows");
    r.provenance.vocabulary_rows = fit.at("vocabulary").get<long>();
    r.provenance.pca_rows = fit.at("pca").get<long>();
    r.provenance.scaler_rows = fit.at("scaler").get<long>();
    return r;
}

nlohmann::json ModelBundle::to_json() const {
    nlohmann::json j;
    j["language"] = language;
    j["stopwords"] = stopword_terms;
    j["vocabulary"] = vocabulary_terms;
    j["class_bits"] = class_bits;
    j["pca_k"] = pca_k;
    j["pca"] = pca ? pca->to_json() : nlohmann::json(nullptr);
    j["scaler"] = scaler.to_json();
    j["classifier"] = classifier_name(classifier);
    j["feature_map"] = {{"qubits", map.n_qubits},
                        {"reps", map.reps},
                        {"entanglement",
                         featmap::entanglement_name(map.entanglement)}};
    j["svm_model"] = svm_model ? svm_model->to_json() : nlohmann::json(nullptr);
    j["vqc_model"] = vqc_model ? vqc_model->to_json() : nlohmann::json(nullptr);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < support_features.rows(); ++r) {
        std::vector<double> row(std::size_t(support_features.cols()));
        for (Eigen::Index c = 0; c < support_features.cols(); ++c)
            row[std::size_t(c)] = support_features(r, c);
        rows.push_back(row);
    }
    j["support_features"] = rows;
    j["train_report"] = train_report.to_json();
    return j;
}

ModelBundle ModelBundle::from_json(const nlohmann::json &j) {
    ModelBundle b;
    b.language = j.at("language").get<std::string>();
    b.stopword_terms = j.at("stopwords").get<std::vector<std::string>>();
    b.vocabulary_terms = j.at("vocabulary").get<std::vector<std::string>>();
    b.class_bits = j.at("class_bits").get<std::map<std::string, int>>();
    b.pca_k = j.at("pca_k").get<int>();
    if (!j.at("pca").is_null())
        b.pca = dimred::PcaModel::from_json(j.at("pca"));
    b.scaler = MinMaxScaler::from_json(j.at("scaler"));
    b.classifier = classifier_from_name(j.at("classifier").get<std::string>());
    const auto &fm = j.at("feature_map");
    b.map.n_qubits = fm.at("qubits").get<int>();
    b.map.reps = fm.at("reps").get<int>();
    b.map.entanglement =
        featmap::entanglement_from_name(fm.at("entanglement").get<std::string>());
    if (!j.at("svm_model").is_null())
        b.svm_model = svm::SvmModel::from_json(j.at("svm_model"));
    if (!j.at("vqc_model").is_null())
        b.vqc_model = qml::VqcModel::from_json(j.at("vqc_model"));
    const auto &rows = j.at("support_features");
    if (!rows.empty()) {
        b.support_features.resize(Eigen::Index(rows.size()),
                                  Eigen::Index(rows[0].size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < rows[r].size(); ++c)
                b.support_features(Eigen::Index(r), Eigen::Index(c)) =
                    rows[r][c].get<double>();
    }
    b.train_report = MetricsReport::from_json(j.at("train_report"));
    return b;
}

void ModelBundle::save(const std::filesystem::path &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write model to " + path.string());
    out << to_json().dump(2) << "\n";
}

ModelBundle ModelBundle::load(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open model file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw DataError("malformed model file " + path.string() + ": " +
                        e.what());
    }
    return from_json(j);
}

std::string report_csv(const std::vector<MetricsReport> &reports) {
    std::string out =
        "method,pca_k,haar_levels,train_acc,test_acc,precision,recall,f1,"
        "train_time_s\n";
    char buf[256];
    for (const auto &r : reports) {
        std::snprintf(buf, sizeof buf,
                      "%s,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      r.method.c_str(), r.pca_k, r.haar_levels,
                      r.train.accuracy, r.test.accuracy, r.test.precision,
                      r.test.recall, r.test.f1, r.train_time_s);
        out += buf;
    }
    return out;
}

void emit_report_csv(const std::vector<MetricsReport> &reports,
                     const std::filesystem::path &path) {
    if (reports.empty())
        throw std::invalid_argument("emit_report_csv: no reports");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write report to " + path.string());
    out << report_csv(reports);
}

void emit_report_json(const std::vector<MetricsReport> &reports,
                      const std::filesystem::path &path) {
    if (reports.empty())
        throw std::invalid_argument("emit_report_json: no reports");
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &r : reports)
        arr.push_back(r.to_json());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write report to " + path.string());
    out << arr.dump(2) << "\n";
}

} // namespace qsent::pipeline
