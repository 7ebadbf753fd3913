#include "sensorfix/classifier.hpp"

#include "sensorfix/errors.hpp"
#include "sensorfix/log.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace sensorfix {

ClassifierKind classifier_kind_from_string(const std::string& s) {
    if (s == "knn") return ClassifierKind::knn;
    if (s == "lda") return ClassifierKind::lda;
    if (s == "plsda") return ClassifierKind::plsda;
    throw ConfigError("unknown classifier kind: " + s);
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::lda: return "lda";
        case ClassifierKind::plsda: return "plsda";
    }
    return "?";
}

struct TrainedModel::Impl {
    ClassifierKind kind = ClassifierKind::knn;
    int n_features = 0;
    int n_classes = 0;
    std::vector<int> present_classes;

    // knn
    int k = 3;
    Eigen::MatrixXd train_x;
    std::vector<int> train_labels;

    // lda: per present class, weight vector and bias of the linear discriminant
    Eigen::MatrixXd lda_weights; // features x present
    Eigen::VectorXd lda_bias;    // present

    // plsda: centered regression onto one-hot labels
    Eigen::VectorXd x_mean;
    Eigen::VectorXd y_mean;      // n_classes
    Eigen::MatrixXd pls_coeffs;  // features x n_classes
};

namespace {

// Canonical neighbour ordering: distance, then lexicographic feature vector,
// then label. Makes knn independent of training row order.
bool canonical_less(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                    double da, long ia, double db, long ib) {
    if (da != db) return da < db;
    for (long f = 0; f < x.cols(); ++f) {
        const double va = x(ia, f), vb = x(ib, f);
        if (va != vb) return va < vb;
    }
    return labels[static_cast<std::size_t>(ia)] < labels[static_cast<std::size_t>(ib)];
}

int knn_predict(const TrainedModel::Impl& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const long n = m.train_x.rows();
    std::vector<long> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0L);
    Eigen::VectorXd dist(n);
    for (long i = 0; i < n; ++i) dist(i) = (m.train_x.row(i).transpose() - x).squaredNorm();
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        return canonical_less(m.train_x, m.train_labels, dist(a), a, dist(b), b);
    });

    const int k_eff = static_cast<int>(std::min<long>(m.k, n));
    std::vector<int> votes(static_cast<std::size_t>(m.n_classes), 0);
    for (int i = 0; i < k_eff; ++i)
        ++votes[static_cast<std::size_t>(m.train_labels[static_cast<std::size_t>(order[i])])];

    int best = -1, best_votes = -1;
    bool tie = false;
    for (int c = 0; c < m.n_classes; ++c) {
        if (votes[static_cast<std::size_t>(c)] > best_votes) {
            best_votes = votes[static_cast<std::size_t>(c)];
            best = c;
            tie = false;
        } else if (votes[static_cast<std::size_t>(c)] == best_votes) {
            tie = true;
        }
    }
    if (tie) return m.train_labels[static_cast<std::size_t>(order[0])];
    return best;
}

void fit_knn(TrainedModel::Impl& m, const ClassifierSpec& spec, const LabeledMatrix& data) {
    m.k = std::max(1, spec.k);
    if (m.k > data.rows()) m.k = static_cast<int>(data.rows());
    m.train_x = data.x;
    m.train_labels = data.labels;
}

void fit_lda(TrainedModel::Impl& m, const ClassifierSpec& spec, const LabeledMatrix& data) {
    const long n = data.rows();
    const long p = data.cols();

    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(p, static_cast<long>(m.present_classes.size()));
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);

    for (std::size_t ci = 0; ci < m.present_classes.size(); ++ci) {
        const int c = m.present_classes[ci];
        long count = 0;
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
        for (long r = 0; r < n; ++r) {
            if (data.labels[static_cast<std::size_t>(r)] != c) continue;
            mu += data.x.row(r).transpose();
            ++count;
        }
        mu /= static_cast<double>(count);
        means.col(static_cast<long>(ci)) = mu;
        for (long r = 0; r < n; ++r) {
            if (data.labels[static_cast<std::size_t>(r)] != c) continue;
            const Eigen::VectorXd d = data.x.row(r).transpose() - mu;
            scatter.noalias() += d * d.transpose();
        }
    }

    const long dof = std::max<long>(1, n - static_cast<long>(m.present_classes.size()));
    Eigen::MatrixXd cov = scatter / static_cast<double>(dof);

    const double trace = cov.trace();
    if (spec.ridge > 0.0) {
        if (trace <= 0.0)
            throw SingularCovariance("lda: covariance trace is zero, all features constant");
        cov.diagonal().array() += spec.ridge * trace / static_cast<double>(p);
    }

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("lda: pooled covariance not positive definite");

    m.lda_weights = llt.solve(means);
    m.lda_bias.resize(static_cast<long>(m.present_classes.size()));
    for (long ci = 0; ci < m.lda_weights.cols(); ++ci)
        m.lda_bias(ci) = -0.5 * means.col(ci).dot(m.lda_weights.col(ci));
}

// PLS2 regression on centered one-hot labels via NIPALS.
void fit_plsda(TrainedModel::Impl& m, const ClassifierSpec& spec, const LabeledMatrix& data) {
    const long n = data.rows();
    const long p = data.cols();
    const long c = m.n_classes;

    m.x_mean = data.x.colwise().mean().transpose();
    Eigen::MatrixXd x = data.x.rowwise() - m.x_mean.transpose();

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, c);
    for (long r = 0; r < n; ++r) y(r, data.labels[static_cast<std::size_t>(r)]) = 1.0;
    m.y_mean = y.colwise().mean().transpose();
    y.rowwise() -= m.y_mean.transpose();

    int requested = spec.latent_vars > 0 ? spec.latent_vars : m.n_classes - 1;
    requested = std::max(1, requested);
    const int max_lv = static_cast<int>(std::min<long>(p, std::max<long>(1, n - 1)));
    if (requested > max_lv) {
        log::warn("plsda: latent_vars " + std::to_string(requested) + " clipped to " +
                  std::to_string(max_lv));
        requested = max_lv;
    }

    const double x_ss0 = x.squaredNorm();
    const double y_ss0 = y.squaredNorm();

    Eigen::MatrixXd weights(p, requested);
    Eigen::MatrixXd loadings(p, requested);
    Eigen::MatrixXd y_loadings(c, requested);

    int achieved = 0;
    for (int a = 0; a < requested; ++a) {
        if (x.squaredNorm() <= 1e-12 * x_ss0 || y.squaredNorm() <= 1e-12 * y_ss0) break;

        long u_col = 0;
        y.colwise().squaredNorm().maxCoeff(&u_col);
        Eigen::VectorXd u = y.col(u_col);

        Eigen::VectorXd w(p), t(n), q(c);
        double tt = 0.0;
        bool component_ok = false;
        Eigen::VectorXd w_prev = Eigen::VectorXd::Zero(p);
        for (int iter = 0; iter < 1000; ++iter) {
            w = x.transpose() * u;
            const double wn = w.norm();
            if (wn <= 1e-300) break;
            w /= wn;
            t = x * w;
            tt = t.squaredNorm();
            if (tt <= 1e-300) break;
            q = y.transpose() * t / tt;
            const double qq = q.squaredNorm();
            component_ok = true;
            if (qq <= 1e-300) break;
            u = y * q / qq;
            if ((w - w_prev).norm() < 1e-13) break;
            w_prev = w;
        }
        if (!component_ok) break;

        const Eigen::VectorXd pa = x.transpose() * t / tt;
        x.noalias() -= t * pa.transpose();
        y.noalias() -= t * q.transpose();

        weights.col(a) = w;
        loadings.col(a) = pa;
        y_loadings.col(a) = q;
        ++achieved;
    }

    if (achieved < requested)
        log::warn("plsda: rank supports only " + std::to_string(achieved) + " of " +
                  std::to_string(requested) + " latent variables");

    if (achieved == 0) {
        m.pls_coeffs = Eigen::MatrixXd::Zero(p, c);
        return;
    }
    const auto w_block = weights.leftCols(achieved);
    const auto p_block = loadings.leftCols(achieved);
    const auto q_block = y_loadings.leftCols(achieved);
    const Eigen::MatrixXd pw = p_block.transpose() * w_block;
    m.pls_coeffs = w_block * pw.partialPivLu().solve(q_block.transpose());
}

int argmax_present(const Eigen::VectorXd& score, const std::vector<int>& present) {
    int best = present.front();
    double best_score = score(best);
    for (int c : present) {
        if (score(c) > best_score) {
            best_score = score(c);
            best = c;
        }
    }
    return best;
}

} // namespace

TrainedModel fit(const ClassifierSpec& spec, const LabeledMatrix& data) {
    data.validate();
    auto impl = std::make_shared<TrainedModel::Impl>();
    impl->kind = spec.kind;
    impl->n_features = static_cast<int>(data.cols());
    impl->n_classes = data.n_classes;
    const auto counts = data.class_counts();
    for (int c = 0; c < data.n_classes; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0) impl->present_classes.push_back(c);

    switch (spec.kind) {
        case ClassifierKind::knn: fit_knn(*impl, spec, data); break;
        case ClassifierKind::lda: fit_lda(*impl, spec, data); break;
        case ClassifierKind::plsda: fit_plsda(*impl, spec, data); break;
    }
    return TrainedModel(std::move(impl));
}

int TrainedModel::n_features() const { return impl_->n_features; }

ClassifierKind TrainedModel::kind() const { return impl_->kind; }

Eigen::VectorXd TrainedModel::scores(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Impl& m = *impl_;
    if (x.size() != m.n_features)
        throw DimensionMismatch("predict: sample has " + std::to_string(x.size()) +
                                " features, model expects " + std::to_string(m.n_features));

    Eigen::VectorXd score = Eigen::VectorXd::Constant(
        m.n_classes, -std::numeric_limits<double>::infinity());
    switch (m.kind) {
        case ClassifierKind::knn: {
            // vote counts; detailed tie handling lives in predict
            score.setZero();
            break;
        }
        case ClassifierKind::lda: {
            for (std::size_t ci = 0; ci < m.present_classes.size(); ++ci) {
                const int c = m.present_classes[ci];
                score(c) = m.lda_weights.col(static_cast<long>(ci)).dot(x) +
                           m.lda_bias(static_cast<long>(ci));
            }
            break;
        }
        case ClassifierKind::plsda: {
            score = m.y_mean + m.pls_coeffs.transpose() * (x - m.x_mean);
            break;
        }
    }
    return score;
}

int TrainedModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Impl& m = *impl_;
    if (x.size() != m.n_features)
        throw DimensionMismatch("predict: sample has " + std::to_string(x.size()) +
                                " features, model expects " + std::to_string(m.n_features));
    if (m.kind == ClassifierKind::knn) return knn_predict(m, x);
    return argmax_present(scores(x), m.present_classes);
}

} // namespace sensorfix
