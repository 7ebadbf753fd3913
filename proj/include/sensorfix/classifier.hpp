#pragma once

#include "sensorfix/dataset.hpp"

#include <memory>
#include <string>

namespace sensorfix {

enum class ClassifierKind { knn, lda, plsda };

ClassifierKind classifier_kind_from_string(const std::string& s);
std::string to_string(ClassifierKind kind);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::knn;
    int k = 3;             // knn neighbours
    double ridge = 1e-6;   // lda regularization, relative to mean covariance diagonal
    int latent_vars = 0;   // plsda; 0 means n_classes - 1
};

// Immutable trained model; fit and predict are deterministic.
class TrainedModel {
public:
    int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    int n_features() const;
    ClassifierKind kind() const;

    // Discriminant/response scores per class id, for tests and diagnostics.
    Eigen::VectorXd scores(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    struct Impl;
    explicit TrainedModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const Impl> impl_;
};

TrainedModel fit(const ClassifierSpec& spec, const LabeledMatrix& data);

} // namespace sensorfix
