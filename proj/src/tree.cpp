#include "nn2rules/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "nn2rules/error.hpp"

namespace nn2rules {

namespace {

double gini(std::size_t neg, std::size_t pos) {
    const double n = static_cast<double>(neg + pos);
    if (n == 0) return 0.0;
    const double p = static_cast<double>(pos) / n;
    return 2.0 * p * (1.0 - p);
}

Label majority(const std::array<std::size_t, 2>& counts) { return counts[1] > counts[0] ? 1 : 0; }

class Builder {
public:
    Builder(const FeatureSchema& schema, std::span<const Instance> instances,
            std::span<const Label> labels, const TreeParams& params)
        : schema_(schema), instances_(instances), labels_(labels), params_(params),
          used_(schema.feature_count(), false) {}

    std::vector<DecisionTree::Node> build() {
        std::vector<std::size_t> rows(instances_.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        grow(rows, 0, 0);
        return std::move(nodes_);
    }

private:
    std::size_t grow(const std::vector<std::size_t>& rows, std::size_t depth, Label fallback) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        std::array<std::size_t, 2> counts{0, 0};
        for (auto r : rows) ++counts[labels_[r]];
        nodes_[id].counts = counts;
        nodes_[id].label = rows.empty() ? fallback : majority(counts);
        if (rows.empty() || depth >= params_.max_depth || counts[0] == 0 || counts[1] == 0)
            return id;

        const double parent = gini(counts[0], counts[1]);
        const double total = static_cast<double>(rows.size());
        std::size_t best = DecisionTree::leaf;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < schema_.feature_count(); ++f) {
            if (used_[f]) continue;
            std::vector<std::array<std::size_t, 2>> per(schema_.value_count(f), {0, 0});
            for (auto r : rows) ++per[instances_[r].values[f]][labels_[r]];
            bool too_small = false;
            std::size_t nonempty = 0;
            double child = 0.0;
            for (const auto& c : per) {
                const auto n = c[0] + c[1];
                nonempty += n > 0;
                if (n > 0 && n < params_.min_leaf) too_small = true;
                child += static_cast<double>(n) / total * gini(c[0], c[1]);
            }
            const double gain = parent - child;
            if (too_small || nonempty < 2) continue;
            if (gain > best_gain) {
                best_gain = gain;
                best = f;
            }
        }
        if (best == DecisionTree::leaf) return id;

        std::vector<std::vector<std::size_t>> parts(schema_.value_count(best));
        for (auto r : rows) parts[instances_[r].values[best]].push_back(r);
        used_[best] = true;
        std::vector<std::size_t> children;
        for (const auto& part : parts) children.push_back(grow(part, depth + 1, nodes_[id].label));
        used_[best] = false;
        nodes_[id].feature = best;
        nodes_[id].children = std::move(children);
        return id;
    }

    const FeatureSchema& schema_;
    std::span<const Instance> instances_;
    std::span<const Label> labels_;
    TreeParams params_;
    std::vector<bool> used_;
    std::vector<DecisionTree::Node> nodes_;
};

} // namespace

Label DecisionTree::predict(const Instance& instance) const {
    if (nodes_.empty()) throw Error("tree: empty tree");
    const Node* node = &nodes_.front();
    while (!node->is_leaf()) node = &nodes_[node->children[instance.values[node->feature]]];
    return node->label;
}

std::size_t DecisionTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        for (auto c : nodes_[id].children) stack.emplace_back(c, d + 1);
    }
    return best;
}

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::positive_leaf_count() const {
    return static_cast<std::size_t>(std::count_if(
        nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf() && n.label == 1; }));
}

std::string DecisionTree::to_text() const {
    std::ostringstream out;
    auto visit = [&](auto&& self, std::size_t id, std::size_t indent, const std::string& edge) -> void {
        const Node& n = nodes_[id];
        out << std::string(indent * 2, ' ') << edge;
        if (n.is_leaf()) {
            out << "class " << int(n.label) << " [" << n.counts[0] << '/' << n.counts[1] << "]\n";
            return;
        }
        out << "split " << schema_.feature(n.feature).name << " [" << n.counts[0] << '/'
            << n.counts[1] << "]\n";
        for (std::size_t v = 0; v < n.children.size(); ++v)
            self(self, n.children[v], indent + 1,
                 schema_.feature(n.feature).name + "=" + schema_.feature(n.feature).values[v] + ": ");
    };
    if (!nodes_.empty()) visit(visit, 0, 0, "");
    return out.str();
}

DecisionTree train_tree(const FeatureSchema& schema, std::span<const Instance> instances,
                        std::span<const Label> labels, const TreeParams& params) {
    if (instances.empty()) throw Error("train_tree: empty training set");
    if (instances.size() != labels.size()) throw Error("train_tree: label count mismatch");
    for (const auto& inst : instances)
        if (!is_valid(inst, schema)) throw Error("train_tree: instance does not fit schema");
    return DecisionTree(schema, Builder(schema, instances, labels, params).build());
}

DecisionTree trepan_lite(const Network& net, const Dataset& train, const TreeParams& params) {
    std::vector<Label> relabeled;
    relabeled.reserve(train.size());
    for (const auto& inst : train.instances) relabeled.push_back(net.predict(inst, train.schema));
    return train_tree(train.schema, train.instances, relabeled, params);
}

} // namespace nn2rules
