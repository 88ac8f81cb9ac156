#include "midas/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "midas/fingerprint.hpp"

namespace midas::learn {

namespace {

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[gen() % i]);
}

std::vector<std::string> collect_classes(const Dataset& data) {
    std::set<std::string> s;
    for (const LabeledSample& d : data) {
        if (d.label.empty())
            throw DomainError("sample label must be non-empty");
        s.insert(d.label);
    }
    if (s.size() < 2)
        throw DomainError("degenerate model: need >= 2 classes");
    return {s.begin(), s.end()};
}

int class_id(const std::vector<std::string>& classes, const std::string& label) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label)
        throw DomainError("unknown class: " + label);
    return static_cast<int>(it - classes.begin());
}

struct EncodedData {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    std::vector<std::string> classes;
    std::size_t dim = 0;
};

EncodedData encode_dataset(const Dataset& data, const FeatureSpec& spec) {
    if (data.size() < 2)
        throw DomainError("need >= 2 samples");
    EncodedData e;
    e.classes = collect_classes(data);
    for (const LabeledSample& s : data) {
        e.features.push_back(encode_features(s, spec));
        e.labels.push_back(class_id(e.classes, s.label));
    }
    e.dim = e.features[0].size();
    for (const auto& f : e.features)
        if (f.size() != e.dim)
            throw DomainError("inconsistent feature dimensions across samples");
    std::vector<std::size_t> per_class(e.classes.size(), 0);
    for (int l : e.labels)
        ++per_class[l];
    for (std::size_t c = 0; c < per_class.size(); ++c)
        if (per_class[c] < 2)
            throw DomainError("class '" + e.classes[c] + "' has fewer than 2 samples");
    return e;
}

} // namespace

HoldContext parse_context(const std::string& s) {
    if (s == "fixed") return HoldContext::fixed;
    if (s == "natural") return HoldContext::natural;
    if (s == "quick") return HoldContext::quick;
    throw DomainError("unknown hold context: " + s);
}

GenderMeta parse_gender(const std::string& s) {
    if (s == "female" || s == "f") return GenderMeta::female;
    if (s == "male" || s == "m") return GenderMeta::male;
    throw DomainError("unknown gender tag: " + s);
}

std::string to_string(HoldContext c) {
    switch (c) {
        case HoldContext::fixed: return "fixed";
        case HoldContext::natural: return "natural";
        case HoldContext::quick: return "quick";
    }
    return "?";
}

std::string to_string(GenderMeta g) {
    return g == GenderMeta::female ? "female" : "male";
}

std::vector<double> encode_features(const LabeledSample& sample, const FeatureSpec& spec) {
    std::vector<double> out = sample.vector.values();
    if (spec.include_context) {
        if (!sample.context)
            throw DomainError("feature encoding: context requested but missing");
        for (int i = 0; i < 3; ++i)
            out.push_back(static_cast<int>(*sample.context) == i ? 1.0 : 0.0);
    }
    if (spec.include_gender) {
        if (!sample.gender)
            throw DomainError("feature encoding: gender requested but missing");
        for (int i = 0; i < 2; ++i)
            out.push_back(static_cast<int>(*sample.gender) == i ? 1.0 : 0.0);
    }
    return out;
}

// ---- Random forest ----

namespace {

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0)
        return 0.0;
    double g = 1.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / total;
        g -= p * p;
    }
    return g;
}

struct TreeBuilder {
    const EncodedData& data;
    const ForestParams& params;
    int features_per_split;
    std::mt19937_64 gen;
    DecisionTree tree;

    int build(std::vector<std::size_t> idx, int depth) {
        std::vector<std::size_t> counts(data.classes.size(), 0);
        for (std::size_t i : idx)
            ++counts[data.labels[i]];
        const std::size_t total = idx.size();
        const bool pure =
            std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        if (pure || depth >= params.max_depth ||
            total < static_cast<std::size_t>(2 * params.min_leaf)) {
            tree.nodes[node_id].class_counts = std::move(counts);
            return node_id;
        }

        // random feature subset, then exhaustive threshold scan per feature
        std::vector<int> feats(data.dim);
        std::iota(feats.begin(), feats.end(), 0);
        seeded_shuffle(feats, gen);
        feats.resize(std::min<std::size_t>(features_per_split, feats.size()));

        double best_impurity = std::numeric_limits<double>::infinity();
        int best_feat = -1;
        double best_thr = 0.0;
        for (int f : feats) {
            std::vector<std::pair<double, int>> vals;
            vals.reserve(total);
            for (std::size_t i : idx)
                vals.emplace_back(data.features[i][f], data.labels[i]);
            std::sort(vals.begin(), vals.end());
            std::vector<std::size_t> left(data.classes.size(), 0);
            std::vector<std::size_t> right = counts;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                ++left[vals[i].second];
                --right[vals[i].second];
                if (vals[i].first == vals[i + 1].first)
                    continue;
                const std::size_t nl = i + 1;
                const std::size_t nr = total - nl;
                if (nl < static_cast<std::size_t>(params.min_leaf) ||
                    nr < static_cast<std::size_t>(params.min_leaf))
                    continue;
                const double imp = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
                if (imp < best_impurity) {
                    best_impurity = imp;
                    best_feat = f;
                    best_thr = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }

        if (best_feat < 0 || best_impurity >= gini(counts, total)) {
            tree.nodes[node_id].class_counts = std::move(counts);
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (data.features[i][best_feat] <= best_thr)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        tree.nodes[node_id].feature = best_feat;
        tree.nodes[node_id].threshold = best_thr;
        const int l = build(std::move(left_idx), depth + 1);
        const int r = build(std::move(right_idx), depth + 1);
        tree.nodes[node_id].left = l;
        tree.nodes[node_id].right = r;
        return node_id;
    }
};

int tree_vote(const DecisionTree& tree, const std::vector<double>& features) {
    int node = 0;
    while (tree.nodes[node].feature >= 0) {
        node = features[tree.nodes[node].feature] <= tree.nodes[node].threshold
                   ? tree.nodes[node].left
                   : tree.nodes[node].right;
    }
    const auto& counts = tree.nodes[node].class_counts;
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

} // namespace

ForestModel train_forest(const Dataset& data, const FeatureSpec& spec,
                         const ForestParams& params) {
    if (params.n_trees < 1 || params.max_depth < 1 || params.min_leaf < 1)
        throw DomainError("forest params must be >= 1");
    const EncodedData e = encode_dataset(data, spec);

    ForestModel model;
    model.classes = e.classes;
    model.dim = e.dim;
    const int fps = params.features_per_split > 0
                        ? params.features_per_split
                        : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(e.dim))));

    for (int t = 0; t < params.n_trees; ++t) {
        std::mt19937_64 gen(params.seed + 0x9e3779b97f4a7c15ULL * (t + 1));
        std::vector<std::size_t> bootstrap(e.features.size());
        for (std::size_t& b : bootstrap)
            b = gen() % e.features.size();
        TreeBuilder builder{e, params, fps, std::mt19937_64(gen()), {}};
        builder.build(std::move(bootstrap), 0);
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

std::string predict(const ForestModel& model, const std::vector<double>& features) {
    if (features.size() != model.dim)
        throw DomainError("feature dimension mismatch");
    std::vector<std::size_t> votes(model.classes.size(), 0);
    for (const DecisionTree& t : model.trees)
        ++votes[tree_vote(t, features)];
    // classes are sorted, so max_element's first-max rule is the lexicographic tie-break
    return model.classes[std::max_element(votes.begin(), votes.end()) - votes.begin()];
}

// ---- SVM ----

SvmModel train_svm(const Dataset& data, const FeatureSpec& spec, const SvmParams& params) {
    if (params.epochs < 0 || params.learning_rate <= 0.0 || params.l2 < 0.0)
        throw DomainError("bad svm params");
    const EncodedData e = encode_dataset(data, spec);

    SvmModel model;
    model.classes = e.classes;
    model.dim = e.dim;
    model.weights.assign(e.classes.size(), std::vector<double>(e.dim, 0.0));
    model.biases.assign(e.classes.size(), 0.0);

    std::mt19937_64 gen(params.seed);
    std::vector<std::size_t> order(e.features.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const double lr = params.learning_rate / (1.0 + 0.1 * epoch);
        seeded_shuffle(order, gen);
        for (std::size_t i : order) {
            const std::vector<double>& x = e.features[i];
            for (std::size_t c = 0; c < e.classes.size(); ++c) {
                const double y = e.labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
                std::vector<double>& w = model.weights[c];
                double margin = model.biases[c];
                for (std::size_t d = 0; d < e.dim; ++d)
                    margin += w[d] * x[d];
                margin *= y;
                for (std::size_t d = 0; d < e.dim; ++d) {
                    double grad = params.l2 * w[d];
                    if (margin < 1.0)
                        grad -= y * x[d];
                    w[d] -= lr * grad;
                }
                if (margin < 1.0)
                    model.biases[c] += lr * y;
            }
        }
    }
    return model;
}

double svm_objective(const SvmModel& model, const std::vector<std::vector<double>>& features,
                     const std::vector<int>& label_ids, double l2) {
    double obj = 0.0;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        double reg = 0.0;
        for (double w : model.weights[c])
            reg += w * w;
        obj += 0.5 * l2 * reg;
        for (std::size_t i = 0; i < features.size(); ++i) {
            const double y = label_ids[i] == static_cast<int>(c) ? 1.0 : -1.0;
            double margin = model.biases[c];
            for (std::size_t d = 0; d < features[i].size(); ++d)
                margin += model.weights[c][d] * features[i][d];
            obj += std::max(0.0, 1.0 - y * margin) / features.size();
        }
    }
    return obj;
}

std::string predict(const SvmModel& model, const std::vector<double>& features) {
    if (features.size() != model.dim)
        throw DomainError("feature dimension mismatch");
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        double margin = model.biases[c];
        for (std::size_t d = 0; d < model.dim; ++d)
            margin += model.weights[c][d] * features[d];
        if (margin > best) {
            best = margin;
            best_c = c;
        }
    }
    return model.classes[best_c];
}

// ---- MLP ----

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

std::vector<double> mlp_flatten(const MlpModel& m) {
    std::vector<double> out;
    out.reserve(m.w1.size() + m.b1.size() + m.w2.size() + m.b2.size());
    out.insert(out.end(), m.w1.begin(), m.w1.end());
    out.insert(out.end(), m.b1.begin(), m.b1.end());
    out.insert(out.end(), m.w2.begin(), m.w2.end());
    out.insert(out.end(), m.b2.begin(), m.b2.end());
    return out;
}

void mlp_unflatten(MlpModel& m, const std::vector<double>& params) {
    if (params.size() != m.w1.size() + m.b1.size() + m.w2.size() + m.b2.size())
        throw DomainError("parameter vector size mismatch");
    auto it = params.begin();
    std::copy(it, it + m.w1.size(), m.w1.begin());
    it += m.w1.size();
    std::copy(it, it + m.b1.size(), m.b1.begin());
    it += m.b1.size();
    std::copy(it, it + m.w2.size(), m.w2.begin());
    it += m.w2.size();
    std::copy(it, it + m.b2.size(), m.b2.begin());
}

std::vector<double> mlp_softmax(const MlpModel& m, const std::vector<double>& x) {
    if (x.size() != m.dim)
        throw DomainError("feature dimension mismatch");
    const int h = m.hidden_units;
    const int k = static_cast<int>(m.classes.size());
    std::vector<double> hidden(h);
    for (int j = 0; j < h; ++j) {
        double z = m.b1[j];
        for (std::size_t d = 0; d < m.dim; ++d)
            z += m.w1[j * m.dim + d] * x[d];
        hidden[j] = logistic(z);
    }
    std::vector<double> logits(k);
    double zmax = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
        double z = m.b2[c];
        for (int j = 0; j < h; ++j)
            z += m.w2[c * h + j] * hidden[j];
        logits[c] = z;
        zmax = std::max(zmax, z);
    }
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
        logits[c] = std::exp(logits[c] - zmax);
        sum += logits[c];
    }
    for (int c = 0; c < k; ++c)
        logits[c] /= sum;
    return logits;
}

double mlp_loss_and_gradient(const MlpModel& m, const std::vector<double>& x, int label_id,
                             std::vector<double>* gradient) {
    const int h = m.hidden_units;
    const int k = static_cast<int>(m.classes.size());
    if (label_id < 0 || label_id >= k)
        throw DomainError("label id out of range");

    std::vector<double> hidden(h);
    for (int j = 0; j < h; ++j) {
        double z = m.b1[j];
        for (std::size_t d = 0; d < m.dim; ++d)
            z += m.w1[j * m.dim + d] * x[d];
        hidden[j] = logistic(z);
    }
    std::vector<double> prob(k);
    double zmax = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
        double z = m.b2[c];
        for (int j = 0; j < h; ++j)
            z += m.w2[c * h + j] * hidden[j];
        prob[c] = z;
        zmax = std::max(zmax, z);
    }
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
        prob[c] = std::exp(prob[c] - zmax);
        sum += prob[c];
    }
    for (int c = 0; c < k; ++c)
        prob[c] /= sum;
    const double loss = -std::log(std::max(prob[label_id], 1e-300));

    if (gradient) {
        gradient->assign(m.w1.size() + m.b1.size() + m.w2.size() + m.b2.size(), 0.0);
        double* gw1 = gradient->data();
        double* gb1 = gw1 + m.w1.size();
        double* gw2 = gb1 + m.b1.size();
        double* gb2 = gw2 + m.w2.size();

        std::vector<double> dz2(k);
        for (int c = 0; c < k; ++c)
            dz2[c] = prob[c] - (c == label_id ? 1.0 : 0.0);
        std::vector<double> dh(h, 0.0);
        for (int c = 0; c < k; ++c) {
            for (int j = 0; j < h; ++j) {
                gw2[c * h + j] = dz2[c] * hidden[j];
                dh[j] += m.w2[c * h + j] * dz2[c];
            }
            gb2[c] = dz2[c];
        }
        for (int j = 0; j < h; ++j) {
            const double dz1 = dh[j] * hidden[j] * (1.0 - hidden[j]);
            for (std::size_t d = 0; d < m.dim; ++d)
                gw1[j * m.dim + d] = dz1 * x[d];
            gb1[j] = dz1;
        }
    }
    return loss;
}

MlpModel train_mlp(const Dataset& data, const FeatureSpec& spec, const MlpParams& params) {
    if (params.hidden_units < 1 || params.epochs < 0 || params.learning_rate <= 0.0)
        throw DomainError("bad mlp params");
    const EncodedData e = encode_dataset(data, spec);

    MlpModel m;
    m.classes = e.classes;
    m.dim = e.dim;
    m.hidden_units = params.hidden_units;
    m.w1.resize(static_cast<std::size_t>(params.hidden_units) * e.dim);
    m.b1.assign(params.hidden_units, 0.0);
    m.w2.resize(e.classes.size() * params.hidden_units);
    m.b2.assign(e.classes.size(), 0.0);

    std::mt19937_64 gen(params.seed);
    auto uniform = [&gen] { return (gen() >> 11) * (1.0 / 9007199254740992.0) - 0.5; };
    const double s1 = 1.0 / std::sqrt(static_cast<double>(e.dim));
    for (double& w : m.w1)
        w = uniform() * s1;
    const double s2 = 1.0 / std::sqrt(static_cast<double>(params.hidden_units));
    for (double& w : m.w2)
        w = uniform() * s2;

    std::vector<std::size_t> order(e.features.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad;
    std::vector<double> p = mlp_flatten(m);
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        seeded_shuffle(order, gen);
        for (std::size_t i : order) {
            mlp_loss_and_gradient(m, e.features[i], e.labels[i], &grad);
            for (std::size_t d = 0; d < p.size(); ++d)
                p[d] -= params.learning_rate * grad[d];
            mlp_unflatten(m, p);
        }
    }
    return m;
}

std::string predict(const MlpModel& model, const std::vector<double>& features) {
    const std::vector<double> p = mlp_softmax(model, features);
    return model.classes[std::max_element(p.begin(), p.end()) - p.begin()];
}

// ---- Evaluation ----

double hamming_loss(const std::vector<std::set<std::string>>& predicted,
                    const std::vector<std::set<std::string>>& truth) {
    if (predicted.size() != truth.size())
        throw DomainError("hamming_loss: scene count mismatch");
    if (predicted.empty())
        throw DomainError("hamming_loss: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        std::set<std::string> uni;
        uni.insert(predicted[i].begin(), predicted[i].end());
        uni.insert(truth[i].begin(), truth[i].end());
        if (uni.empty())
            continue;
        std::size_t diff = 0;
        for (const std::string& l : uni)
            if (predicted[i].count(l) != truth[i].count(l))
                ++diff;
        total += static_cast<double>(diff) / uni.size();
    }
    return total / predicted.size();
}

std::vector<Fold> kfold_split(const Dataset& data, int k, std::uint64_t seed) {
    if (k < 2)
        throw DomainError("k must be >= 2");
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < data.size(); ++i)
        by_class[data[i].label].push_back(i);
    for (const auto& [label, idx] : by_class)
        if (idx.size() < static_cast<std::size_t>(k))
            throw DomainError("class '" + label + "' has fewer samples than k");

    std::mt19937_64 gen(seed);
    std::vector<std::vector<std::size_t>> fold_idx(k);
    std::size_t cursor = 0;
    for (auto& [label, idx] : by_class) {
        seeded_shuffle(idx, gen);
        for (std::size_t j = 0; j < idx.size(); ++j)
            fold_idx[(cursor + j) % k].push_back(idx[j]);
        cursor = (cursor + idx.size()) % k;
    }

    std::vector<Fold> folds(k);
    for (int f = 0; f < k; ++f) {
        std::vector<bool> in_test(data.size(), false);
        for (std::size_t i : fold_idx[f])
            in_test[i] = true;
        for (std::size_t i = 0; i < data.size(); ++i)
            (in_test[i] ? folds[f].test : folds[f].train).push_back(data[i]);
    }
    return folds;
}

// ---- Serialization ----

namespace {

constexpr const char* kModelMagic = "MIDASMODEL";
constexpr int kModelVersion = 1;

void write_doubles(std::ostream& os, const std::vector<double>& v) {
    char buf[64];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, " %.17g", x);
        os << buf;
    }
    os << '\n';
}

void write_common(std::ostream& os, const std::vector<std::string>& classes, std::size_t dim,
                  const char* kind) {
    os << kModelMagic << ' ' << kModelVersion << ' ' << kind << '\n';
    os << "classes " << classes.size();
    for (const std::string& c : classes)
        os << ' ' << c;
    os << '\n';
    os << "dim " << dim << '\n';
}

void read_common(std::istream& is, std::vector<std::string>& classes, std::size_t& dim) {
    std::string tok;
    std::size_t n = 0;
    if (!(is >> tok >> n) || tok != "classes")
        throw FormatError("model: expected classes line");
    classes.resize(n);
    for (std::string& c : classes)
        if (!(is >> c))
            throw FormatError("model: truncated class list");
    if (!(is >> tok >> dim) || tok != "dim")
        throw FormatError("model: expected dim line");
}

void read_doubles(std::istream& is, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (double& x : v)
        if (!(is >> x))
            throw FormatError("model: truncated parameter block");
}

} // namespace

void save_model(const ForestModel& m, std::ostream& os) {
    write_common(os, m.classes, m.dim, "forest");
    os << "trees " << m.trees.size() << '\n';
    for (const DecisionTree& t : m.trees) {
        os << "tree " << t.nodes.size() << '\n';
        char buf[64];
        for (const TreeNode& n : t.nodes) {
            if (n.feature >= 0) {
                std::snprintf(buf, sizeof buf, "%.17g", n.threshold);
                os << "split " << n.feature << ' ' << buf << ' ' << n.left << ' ' << n.right
                   << '\n';
            } else {
                os << "leaf";
                for (std::size_t c : n.class_counts)
                    os << ' ' << c;
                os << '\n';
            }
        }
    }
}

void save_model(const SvmModel& m, std::ostream& os) {
    write_common(os, m.classes, m.dim, "svm");
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", m.biases[c]);
        os << "head " << buf;
        for (double w : m.weights[c]) {
            std::snprintf(buf, sizeof buf, " %.17g", w);
            os << buf;
        }
        os << '\n';
    }
}

void save_model(const MlpModel& m, std::ostream& os) {
    write_common(os, m.classes, m.dim, "mlp");
    os << "hidden " << m.hidden_units << '\n';
    os << "w1";
    write_doubles(os, m.w1);
    os << "b1";
    write_doubles(os, m.b1);
    os << "w2";
    write_doubles(os, m.w2);
    os << "b2";
    write_doubles(os, m.b2);
}

AnyModel load_model(std::istream& is) {
    std::string magic, kind;
    int version = 0;
    if (!(is >> magic >> version >> kind) || magic != kModelMagic)
        throw FormatError("not a model file");
    if (version != kModelVersion)
        throw FormatError("unsupported model version " + std::to_string(version));

    AnyModel any;
    if (kind == "forest") {
        any.kind = ModelKind::forest;
        ForestModel& m = any.forest;
        read_common(is, m.classes, m.dim);
        std::string tok;
        std::size_t n_trees = 0;
        if (!(is >> tok >> n_trees) || tok != "trees")
            throw FormatError("model: expected trees line");
        m.trees.resize(n_trees);
        for (DecisionTree& t : m.trees) {
            std::size_t n_nodes = 0;
            if (!(is >> tok >> n_nodes) || tok != "tree")
                throw FormatError("model: expected tree line");
            t.nodes.resize(n_nodes);
            for (TreeNode& node : t.nodes) {
                if (!(is >> tok))
                    throw FormatError("model: truncated tree");
                if (tok == "split") {
                    if (!(is >> node.feature >> node.threshold >> node.left >> node.right))
                        throw FormatError("model: bad split node");
                } else if (tok == "leaf") {
                    node.feature = -1;
                    node.class_counts.resize(m.classes.size());
                    for (std::size_t& c : node.class_counts)
                        if (!(is >> c))
                            throw FormatError("model: bad leaf node");
                } else {
                    throw FormatError("model: unknown node kind " + tok);
                }
            }
        }
    } else if (kind == "svm") {
        any.kind = ModelKind::svm;
        SvmModel& m = any.svm;
        read_common(is, m.classes, m.dim);
        m.weights.resize(m.classes.size());
        m.biases.resize(m.classes.size());
        std::string tok;
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
            if (!(is >> tok) || tok != "head")
                throw FormatError("model: expected head line");
            if (!(is >> m.biases[c]))
                throw FormatError("model: bad bias");
            read_doubles(is, m.weights[c], m.dim);
        }
    } else if (kind == "mlp") {
        any.kind = ModelKind::mlp;
        MlpModel& m = any.mlp;
        read_common(is, m.classes, m.dim);
        std::string tok;
        if (!(is >> tok >> m.hidden_units) || tok != "hidden")
            throw FormatError("model: expected hidden line");
        auto block = [&](const char* name, std::vector<double>& v, std::size_t n) {
            if (!(is >> tok) || tok != name)
                throw FormatError(std::string("model: expected ") + name + " block");
            read_doubles(is, v, n);
        };
        block("w1", m.w1, static_cast<std::size_t>(m.hidden_units) * m.dim);
        block("b1", m.b1, m.hidden_units);
        block("w2", m.w2, m.classes.size() * m.hidden_units);
        block("b2", m.b2, m.classes.size());
    } else {
        throw FormatError("unknown model kind: " + kind);
    }
    return any;
}

std::string AnyModel::predict_label(const std::vector<double>& features) const {
    switch (kind) {
        case ModelKind::forest: return predict(forest, features);
        case ModelKind::svm: return predict(svm, features);
        case ModelKind::mlp: return predict(mlp, features);
    }
    throw DomainError("corrupt model kind");
}

std::size_t AnyModel::dim() const {
    switch (kind) {
        case ModelKind::forest: return forest.dim;
        case ModelKind::svm: return svm.dim;
        case ModelKind::mlp: return mlp.dim;
    }
    throw DomainError("corrupt model kind");
}

void save_model_file(const AnyModel& m, const std::string& path) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open for writing: " + path);
    switch (m.kind) {
        case ModelKind::forest: save_model(m.forest, os); break;
        case ModelKind::svm: save_model(m.svm, os); break;
        case ModelKind::mlp: save_model(m.mlp, os); break;
    }
    if (!os)
        throw IoError("model write failure: " + path);
}

AnyModel load_model_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open for reading: " + path);
    return load_model(is);
}

Dataset load_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open manifest: " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    Dataset data;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string vec_path, label, opt1, opt2;
        if (!(ls >> vec_path))
            continue;
        if (!(ls >> label))
            throw FormatError("manifest line " + std::to_string(line_no) + ": missing label");
        std::filesystem::path p(vec_path);
        if (p.is_relative())
            p = base / p;

        LabeledSample sample{fp::read_vector_file(p.string()), std::nullopt, std::nullopt, label};
        if (ls >> opt1)
            sample.context = parse_context(opt1);
        if (ls >> opt2)
            sample.gender = parse_gender(opt2);
        data.push_back(std::move(sample));
    }
    return data;
}

} // namespace midas::learn
