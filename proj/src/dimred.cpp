#include "qsent/dimred.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "qsent/errors.hpp"

namespace qsent::dimred {

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd &v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json &arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        v[Eigen::Index(i)] = arr[i].get<double>();
    return v;
}

} // namespace

PcaModel pca_fit(const FeatureMatrix &X) {
    if (X.rows() < 2)
        throw std::invalid_argument("pca_fit needs at least 2 rows");
    if (!X.allFinite())
        throw std::invalid_argument("pca_fit: non-finite entries");

    const Eigen::VectorXd mean = X.colwise().mean();
    const FeatureMatrix centered = X.rowwise() - mean.transpose();

    Eigen::BDCSVD<FeatureMatrix> svd(centered,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma[0] <= 1e-12)
        throw DataError("pca_fit: no variance in the data");

    PcaModel model;
    model.mean = mean;
    model.components = svd.matrixV().transpose();
    model.explained_variance =
        sigma.array().square() / double(X.rows() - 1);

    // Deterministic sign: largest-magnitude entry of each component positive.
    for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
        Eigen::Index imax = 0;
        model.components.row(r).cwiseAbs().maxCoeff(&imax);
        if (model.components(r, imax) < 0.0)
            model.components.row(r) *= -1.0;
    }
    return model;
}

FeatureMatrix pca_transform(const PcaModel &model, const FeatureMatrix &X,
                            int k) {
    if (k < 1 || k > model.n_components())
        throw std::invalid_argument(
            "pca_transform: k=" + std::to_string(k) + " not in [1, " +
            std::to_string(model.n_components()) + "]");
    if (X.cols() != model.mean.size())
        throw std::invalid_argument("pca_transform: feature count mismatch");
    return (X.rowwise() - model.mean.transpose()) *
           model.components.topRows(k).transpose();
}

nlohmann::json PcaModel::to_json() const {
    nlohmann::json comps = nlohmann::json::array();
    for (Eigen::Index r = 0; r < components.rows(); ++r)
        comps.push_back(vector_to_json(components.row(r)));
    return {{"mean", vector_to_json(mean)},
            {"components", comps},
            {"explained_variance", vector_to_json(explained_variance)}};
}

PcaModel PcaModel::from_json(const nlohmann::json &j) {
    PcaModel model;
    model.mean = vector_from_json(j.at("mean"));
    const auto &comps = j.at("components");
    model.components.resize(Eigen::Index(comps.size()), model.mean.size());
    for (std::size_t r = 0; r < comps.size(); ++r)
        model.components.row(Eigen::Index(r)) =
            vector_from_json(comps[r]).transpose();
    model.explained_variance = vector_from_json(j.at("explained_variance"));
    return model;
}

HaarDecomposition haar_forward(const Eigen::VectorXd &signal, int levels) {
    if (levels < 1)
        throw std::invalid_argument("haar_forward: levels must be >= 1");
    const Eigen::Index n = signal.size();
    if (n == 0 || n % (Eigen::Index(1) << levels) != 0)
        throw std::invalid_argument(
            "haar_forward: length " + std::to_string(n) +
            " is not divisible by 2^" + std::to_string(levels) +
            "; truncate or pad the signal to a multiple first");

    HaarDecomposition d;
    d.levels = levels;
    Eigen::VectorXd approx = signal;
    for (int l = 0; l < levels; ++l) {
        const Eigen::Index half = approx.size() / 2;
        Eigen::VectorXd next(half), detail(half);
        for (Eigen::Index i = 0; i < half; ++i) {
            next[i] = (approx[2 * i] + approx[2 * i + 1]) / 2.0;
            detail[i] = (approx[2 * i] - approx[2 * i + 1]) / 2.0;
        }
        d.details.push_back(std::move(detail));
        approx = std::move(next);
    }
    d.approximation = std::move(approx);
    return d;
}

Eigen::VectorXd haar_inverse(const HaarDecomposition &d) {
    if (int(d.details.size()) != d.levels)
        throw std::invalid_argument("haar_inverse: level count mismatch");
    Eigen::VectorXd x = d.approximation;
    for (int l = d.levels - 1; l >= 0; --l) {
        const Eigen::VectorXd &detail = d.details[std::size_t(l)];
        if (detail.size() != x.size())
            throw std::invalid_argument(
                "haar_inverse: detail length " + std::to_string(detail.size()) +
                " does not match approximation length " +
                std::to_string(x.size()) + " at level " + std::to_string(l));
        Eigen::VectorXd up(2 * x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            up[2 * i] = x[i] + detail[i];
            up[2 * i + 1] = x[i] - detail[i];
        }
        x = std::move(up);
    }
    return x;
}

nlohmann::json HaarDecomposition::to_json() const {
    nlohmann::json det = nlohmann::json::array();
    for (const auto &d : details)
        det.push_back(vector_to_json(d));
    return {{"levels", levels},
            {"approximation", vector_to_json(approximation)},
            {"details", det}};
}

HaarDecomposition HaarDecomposition::from_json(const nlohmann::json &j) {
    HaarDecomposition d;
    d.levels = j.at("levels").get<int>();
    d.approximation = vector_from_json(j.at("approximation"));
    for (const auto &det : j.at("details"))
        d.details.push_back(vector_from_json(det));
    return d;
}

CompressedDataset haar_compress_dataset(const FeatureMatrix &X,
                                        const Labels &y, int levels) {
    if (std::size_t(X.rows()) != y.size())
        throw std::invalid_argument("haar_compress_dataset: label count");
    if (levels < 0)
        throw std::invalid_argument("haar_compress_dataset: negative levels");
    if (levels == 0)
        return {X, y, 0};

    // Rows stay in dataset order within each class before pairing.
    std::vector<Eigen::Index> class_rows[2];
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        if (y[std::size_t(r)] != 0 && y[std::size_t(r)] != 1)
            throw std::invalid_argument(
                "haar_compress_dataset: labels must be 0/1");
        class_rows[y[std::size_t(r)]].push_back(r);
    }

    const Eigen::Index block = Eigen::Index(1) << levels;
    CompressedDataset out;
    out.truncated_rows = 0;

    std::vector<Eigen::VectorXd> rows;
    for (int cls = 0; cls < 2; ++cls) {
        const auto &idx = class_rows[cls];
        const Eigen::Index kept = (Eigen::Index(idx.size()) / block) * block;
        out.truncated_rows += int(Eigen::Index(idx.size()) - kept);
        if (!idx.empty() && kept == 0)
            throw DataError("haar_compress_dataset: over-compressed; class " +
                            std::to_string(cls) + " has " +
                            std::to_string(idx.size()) +
                            " rows, fewer than 2^" + std::to_string(levels));
        if (kept == 0)
            continue;
        const Eigen::Index compressed = kept / block;
        FeatureMatrix sub(compressed, X.cols());
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            Eigen::VectorXd column(kept);
            for (Eigen::Index i = 0; i < kept; ++i)
                column[i] = X(idx[std::size_t(i)], c);
            sub.col(c) = haar_forward(column, levels).approximation;
        }
        for (Eigen::Index r = 0; r < compressed; ++r) {
            rows.push_back(sub.row(r));
            out.y.push_back(cls);
        }
    }

    out.X.resize(Eigen::Index(rows.size()), X.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.X.row(Eigen::Index(r)) = rows[r].transpose();
    return out;
}

} // namespace qsent::dimred
