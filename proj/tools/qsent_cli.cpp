// qsent: hybrid quantum-classical sentiment analysis pipeline.
//
// Subcommands: preprocess (emit count vectors), train, evaluate, sweep
// (method x reduction matrix), report (merge JSON reports into CSV).
// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 classifier did not converge.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "qsent/errors.hpp"
#include "qsent/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qsent;

namespace {

struct CommonOptions {
    std::string dataset;
    std::string language = "english";
    std::string stopwords;
    double ratio = 0.8;
    std::uint32_t seed = 42;
    int pca_k = 0;
    int haar_levels = 0;
    std::string classifier = "classical_svm";
    int reps = 2;
    std::string entanglement = "linear";
    double svm_c = 1.0;
    double svm_tol = 1e-3;
    int svm_max_passes = 100;
    int vqc_layers = 3;
    int vqc_iterations = 100;
    double vqc_lr = 0.01;
    double vqc_threshold = 0.0;
    std::string out;
    std::string format = "csv";
};

// Shared [section].key options so `train` and `sweep` read the same config
// schema; flags override config-file values.
void add_pipeline_options(CLI::App *cmd, CommonOptions &opt,
                          bool classifier_single) {
    cmd->set_config("--config,-c", "", "Config file (key/value with sections)");
    cmd->add_option("--data.path", opt.dataset, "Dataset CSV (text,label)");
    cmd->add_option("--data.language", opt.language, "english | bengali");
    cmd->add_option("--data.stopwords", opt.stopwords, "Stop-word list file");
    cmd->add_option("--split.ratio", opt.ratio, "Training fraction");
    cmd->add_option("--seed", opt.seed, "Shuffle/optimizer seed");
    cmd->add_option("--reduce.pca_k", opt.pca_k, "0 (off), 2, 4 or 6");
    cmd->add_option("--reduce.haar_levels", opt.haar_levels,
                    "Haar compression levels (0..5)");
    if (classifier_single)
        cmd->add_option("--classifier.kind", opt.classifier,
                        "classical_svm | qkernel_svm | vqc");
    cmd->add_option("--featmap.reps", opt.reps, "Feature map repetitions");
    cmd->add_option("--featmap.entanglement", opt.entanglement,
                    "linear | full");
    cmd->add_option("--svm.c", opt.svm_c, "Soft-margin C");
    cmd->add_option("--svm.tol", opt.svm_tol, "KKT tolerance");
    cmd->add_option("--svm.max_passes", opt.svm_max_passes,
                    "Sweep budget before flagging non-convergence");
    cmd->add_option("--vqc.layers", opt.vqc_layers, "Ansatz layers");
    cmd->add_option("--vqc.iterations", opt.vqc_iterations, "ADAM iterations");
    cmd->add_option("--vqc.lr", opt.vqc_lr, "ADAM learning rate");
    cmd->add_option("--vqc.threshold", opt.vqc_threshold,
                    "Decision threshold on the parity expectation");
    cmd->add_option("--out,-o", opt.out, "Output path");
    cmd->add_option("--format", opt.format, "csv | json");
}

pipeline::ExperimentConfig to_experiment(const CommonOptions &opt) {
    pipeline::ExperimentConfig cfg;
    if (opt.dataset.empty())
        throw ConfigError("no dataset given (set data.path)");
    cfg.dataset = opt.dataset;
    cfg.language = opt.language;
    cfg.stopwords = opt.stopwords;
    cfg.split_ratio = opt.ratio;
    cfg.seed = opt.seed;
    cfg.pca_k = opt.pca_k;
    cfg.haar_levels = opt.haar_levels;
    cfg.classifier = pipeline::classifier_from_name(opt.classifier);
    cfg.map.reps = opt.reps;
    cfg.map.entanglement = featmap::entanglement_from_name(opt.entanglement);
    cfg.svm.C = opt.svm_c;
    cfg.svm.tol = opt.svm_tol;
    cfg.svm.max_passes = opt.svm_max_passes;
    cfg.svm.seed = opt.seed;
    cfg.vqc.layers = opt.vqc_layers;
    cfg.vqc.iterations = opt.vqc_iterations;
    cfg.vqc.adam.lr = opt.vqc_lr;
    cfg.vqc.threshold = opt.vqc_threshold;
    cfg.vqc.seed = opt.seed;
    return cfg;
}

void emit_reports(const std::vector<pipeline::MetricsReport> &reports,
                  const std::string &out, const std::string &format) {
    if (format == "json")
        pipeline::emit_report_json(reports, out);
    else if (format == "csv")
        pipeline::emit_report_csv(reports, out);
    else
        throw ConfigError("unknown report format: " + format);
    std::printf("wrote %zu report row(s) to %s\n", reports.size(),
                out.c_str());
}

void print_report_line(const pipeline::MetricsReport &r) {
    std::printf("%-13s pca_k=%d haar=%d train_acc=%.4f test_acc=%.4f "
                "f1=%.4f time=%.3fs%s\n",
                r.method.c_str(), r.pca_k, r.haar_levels, r.train.accuracy,
                r.test.accuracy, r.test.f1, r.train_time_s,
                r.converged ? "" : " [not converged]");
}

int cmd_preprocess(const std::string &dataset, const std::string &language,
                   const std::string &stopwords, const std::string &out,
                   const std::string &vocab_out) {
    const auto raw = pipeline::load_dataset(dataset);
    const auto cleaner = textprep::TextCleaner::defaults();
    textprep::StopWordSet stops;
    if (!stopwords.empty())
        stops = textprep::StopWordSet::load(stopwords);

    std::vector<textprep::Document> docs;
    long discarded = 0;
    for (const auto &d : raw) {
        std::string cleaned = cleaner.clean(d.text);
        if (cleaned.empty()) {
            ++discarded;
            continue;
        }
        docs.push_back({std::move(cleaned), d.label});
    }
    if (docs.empty())
        throw DataError("every document was discarded during cleaning");

    std::vector<std::vector<std::string>> tokens;
    std::vector<std::string> labels;
    for (const auto &d : docs) {
        tokens.push_back(
            textprep::remove_stopwords(textprep::tokenize(d.text), stops));
        labels.push_back(d.label);
    }
    const auto vocab = textprep::Vocabulary::build(tokens);
    const auto encoding = textprep::encode_labels(labels);

    std::ofstream outfile(out, std::ios::binary);
    if (!outfile)
        throw DataError("cannot write vectors to " + out);
    outfile << "label";
    for (const auto &term : vocab.terms())
        outfile << "," << term;
    outfile << "\n";
    for (std::size_t d = 0; d < tokens.size(); ++d) {
        outfile << encoding.labels[d];
        for (const int c : textprep::vectorize(tokens[d], vocab))
            outfile << "," << c;
        outfile << "\n";
    }
    if (!vocab_out.empty())
        vocab.save_csv(vocab_out);

    std::printf("vectorized %zu documents (%ld discarded), vocabulary %zu "
                "terms; wrote %s\n",
                docs.size(), discarded, vocab.size(), out.c_str());
    (void)language;
    return 0;
}

int cmd_train(const CommonOptions &opt) {
    const auto cfg = to_experiment(opt);
    const pipeline::ModelBundle bundle = pipeline::fit_pipeline(cfg);
    const std::string out = opt.out.empty() ? "model.json" : opt.out;
    bundle.save(out);
    print_report_line(bundle.train_report);
    std::printf("saved model to %s\n", out.c_str());
    return bundle.train_report.converged ? 0 : 3;
}

int cmd_evaluate(const std::string &model_path, const std::string &dataset,
                 const std::string &out, const std::string &format) {
    const auto bundle = pipeline::ModelBundle::load(model_path);
    const auto docs = pipeline::load_dataset(dataset);
    const pipeline::MetricsReport report =
        pipeline::evaluate_bundle(bundle, docs);
    print_report_line(report);
    if (!out.empty())
        emit_reports({report}, out, format);
    return 0;
}

int cmd_sweep(const CommonOptions &opt, std::vector<std::string> methods,
              std::vector<int> pca_values, std::vector<int> haar_values) {
    if (methods.empty())
        methods = {"classical_svm", "qkernel_svm", "vqc"};
    if (pca_values.empty())
        pca_values = {opt.pca_k};
    if (haar_values.empty())
        haar_values = {opt.haar_levels};

    std::vector<pipeline::MetricsReport> reports;
    bool all_converged = true;
    for (const auto &method : methods) {
        for (const int pca_k : pca_values) {
            for (const int haar : haar_values) {
                CommonOptions one = opt;
                one.classifier = method;
                one.pca_k = pca_k;
                one.haar_levels = haar;
                const auto cfg = to_experiment(one);
                reports.push_back(pipeline::run_experiment(cfg));
                print_report_line(reports.back());
                all_converged &= reports.back().converged;
            }
        }
    }
    const std::string out = opt.out.empty() ? "report.csv" : opt.out;
    emit_reports(reports, out, opt.format);
    return all_converged ? 0 : 3;
}

int cmd_report(const std::vector<std::string> &inputs, const std::string &out,
               const std::string &format) {
    std::vector<pipeline::MetricsReport> reports;
    for (const auto &path : inputs) {
        std::ifstream in(path);
        if (!in)
            throw DataError("cannot open report file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception &e) {
            throw DataError("malformed report " + path + ": " + e.what());
        }
        if (j.is_array())
            for (const auto &item : j)
                reports.push_back(pipeline::MetricsReport::from_json(item));
        else
            reports.push_back(pipeline::MetricsReport::from_json(j));
    }
    emit_reports(reports, out, format);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum-classical sentiment analysis pipeline"};
    app.require_subcommand(1);

    // preprocess
    auto *pre = app.add_subcommand("preprocess",
                                   "Clean, tokenize and emit count vectors");
    std::string pre_dataset, pre_stopwords, pre_vocab;
    std::string pre_language = "english";
    std::string pre_out = "vectors.csv";
    pre->add_option("--data.path,-d", pre_dataset, "Dataset CSV")->required();
    pre->add_option("--data.language", pre_language, "english | bengali");
    pre->add_option("--data.stopwords", pre_stopwords, "Stop-word list file");
    pre->add_option("--out,-o", pre_out, "Count-vector CSV output");
    pre->add_option("--vocab", pre_vocab, "Also write the vocabulary CSV here");

    // train
    auto *train = app.add_subcommand("train", "Fit a pipeline and save it");
    CommonOptions train_opt;
    add_pipeline_options(train, train_opt, true);

    // evaluate
    auto *eval = app.add_subcommand("evaluate",
                                    "Apply a saved model to a dataset");
    std::string eval_model, eval_dataset, eval_out;
    std::string eval_format = "json";
    eval->add_option("--model,-m", eval_model, "Model JSON from `train`")
        ->required();
    eval->add_option("--data.path,-d", eval_dataset, "Dataset CSV")->required();
    eval->add_option("--out,-o", eval_out, "Optional report output");
    eval->add_option("--format", eval_format, "csv | json");

    // sweep
    auto *sweep = app.add_subcommand(
        "sweep", "Run a method x reduction matrix and emit one report");
    CommonOptions sweep_opt;
    std::vector<std::string> sweep_methods;
    std::vector<int> sweep_pca, sweep_haar;
    add_pipeline_options(sweep, sweep_opt, false);
    sweep->add_option("--matrix.methods", sweep_methods,
                      "Classifiers to run (default: all three)");
    sweep->add_option("--matrix.pca_k", sweep_pca, "PCA widths to run");
    sweep->add_option("--matrix.haar_levels", sweep_haar,
                      "Haar levels to run");

    // report
    auto *rep = app.add_subcommand("report",
                                   "Merge JSON reports into one CSV/JSON");
    std::vector<std::string> rep_inputs;
    std::string rep_out = "report.csv";
    std::string rep_format = "csv";
    rep->add_option("--in,-i", rep_inputs, "Report JSON files")->required();
    rep->add_option("--out,-o", rep_out, "Merged output path");
    rep->add_option("--format", rep_format, "csv | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (pre->parsed())
            return cmd_preprocess(pre_dataset, pre_language, pre_stopwords,
                                  pre_out, pre_vocab);
        if (train->parsed())
            return cmd_train(train_opt);
        if (eval->parsed())
            return cmd_evaluate(eval_model, eval_dataset, eval_out,
                                eval_format);
        if (sweep->parsed())
            return cmd_sweep(sweep_opt, sweep_methods, sweep_pca, sweep_haar);
        if (rep->parsed())
            return cmd_report(rep_inputs, rep_out, rep_format);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
