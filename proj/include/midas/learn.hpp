#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "midas/core.hpp"

namespace midas::learn {

enum class HoldContext { fixed, natural, quick };
enum class GenderMeta { female, male };

HoldContext parse_context(const std::string& s);
GenderMeta parse_gender(const std::string& s);
std::string to_string(HoldContext c);
std::string to_string(GenderMeta g);

struct LabeledSample {
    DissipationVector vector;
    std::optional<HoldContext> context;
    std::optional<GenderMeta> gender;
    std::string label;
};

struct FeatureSpec {
    bool include_context = false;
    bool include_gender = false;
};

// Vector values followed by the configured one-hot blocks (context 3, gender 2).
std::vector<double> encode_features(const LabeledSample& sample, const FeatureSpec& spec);

using Dataset = std::vector<LabeledSample>;

// ---- Random forest ----

struct TreeNode {
    int feature = -1;      // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    std::vector<std::size_t> class_counts; // leaf histogram
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // node 0 is the root
};

struct ForestParams {
    int n_trees = 50;
    int max_depth = 12;
    int min_leaf = 1;
    int features_per_split = 0; // 0 -> floor(sqrt(dim))
    std::uint64_t seed = 0;
};

struct ForestModel {
    std::vector<std::string> classes; // sorted
    std::size_t dim = 0;
    std::vector<DecisionTree> trees;
};

ForestModel train_forest(const Dataset& data, const FeatureSpec& spec, const ForestParams& params);

// ---- Linear SVM (one-vs-rest, hinge + L2, SGD) ----

struct SvmParams {
    int epochs = 200;
    double learning_rate = 0.01;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
};

struct SvmModel {
    std::vector<std::string> classes;
    std::size_t dim = 0;
    std::vector<std::vector<double>> weights; // one row per class
    std::vector<double> biases;
};

SvmModel train_svm(const Dataset& data, const FeatureSpec& spec, const SvmParams& params);

// Full regularized hinge objective; exposed for convergence checks.
double svm_objective(const SvmModel& model, const std::vector<std::vector<double>>& features,
                     const std::vector<int>& label_ids, double l2);

// ---- One-hidden-layer MLP (logistic hidden, softmax output) ----

struct MlpParams {
    int hidden_units = 16;
    int epochs = 300;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
};

struct MlpModel {
    std::vector<std::string> classes;
    std::size_t dim = 0;
    int hidden_units = 0;
    std::vector<double> w1, b1; // hidden x dim, hidden
    std::vector<double> w2, b2; // classes x hidden, classes
};

MlpModel train_mlp(const Dataset& data, const FeatureSpec& spec, const MlpParams& params);

std::vector<double> mlp_softmax(const MlpModel& model, const std::vector<double>& features);

// Cross-entropy loss and its gradient w.r.t. all parameters, flattened in
// (w1, b1, w2, b2) order. Used for training and the finite-difference check.
double mlp_loss_and_gradient(const MlpModel& model, const std::vector<double>& features,
                             int label_id, std::vector<double>* gradient);
std::vector<double> mlp_flatten(const MlpModel& model);
void mlp_unflatten(MlpModel& model, const std::vector<double>& params);

// ---- Prediction & evaluation ----

std::string predict(const ForestModel& model, const std::vector<double>& features);
std::string predict(const SvmModel& model, const std::vector<double>& features);
std::string predict(const MlpModel& model, const std::vector<double>& features);

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> confusion; // [true][predicted]
};

template <typename Model>
EvalReport evaluate(const Model& model, const Dataset& test, const FeatureSpec& spec) {
    if (test.empty())
        throw DomainError("evaluate: empty test set");
    EvalReport report;
    report.classes = model.classes;
    report.confusion.assign(model.classes.size(),
                            std::vector<std::size_t>(model.classes.size(), 0));
    std::size_t correct = 0;
    for (const LabeledSample& s : test) {
        const std::string got = predict(model, encode_features(s, spec));
        if (got == s.label)
            ++correct;
        const auto ti = std::find(model.classes.begin(), model.classes.end(), s.label);
        const auto pi = std::find(model.classes.begin(), model.classes.end(), got);
        if (ti != model.classes.end() && pi != model.classes.end())
            ++report.confusion[ti - model.classes.begin()][pi - model.classes.begin()];
    }
    report.accuracy = static_cast<double>(correct) / test.size();
    return report;
}

double hamming_loss(const std::vector<std::set<std::string>>& predicted,
                    const std::vector<std::set<std::string>>& truth);

struct Fold {
    Dataset train;
    Dataset test;
};

// Stratified, seeded, disjoint folds covering all samples.
std::vector<Fold> kfold_split(const Dataset& data, int k, std::uint64_t seed);

// ---- Serialization (versioned text format) ----

void save_model(const ForestModel& m, std::ostream& os);
void save_model(const SvmModel& m, std::ostream& os);
void save_model(const MlpModel& m, std::ostream& os);

enum class ModelKind { forest, svm, mlp };

struct AnyModel {
    ModelKind kind = ModelKind::forest;
    ForestModel forest;
    SvmModel svm;
    MlpModel mlp;

    std::string predict_label(const std::vector<double>& features) const;
    std::size_t dim() const;
};

AnyModel load_model(std::istream& is);
void save_model_file(const AnyModel& m, const std::string& path);
AnyModel load_model_file(const std::string& path);

// Manifest: one sample per line, "path label [context] [gender]".
Dataset load_manifest(const std::string& path);

} // namespace midas::learn
