#pragma once

// CART regression trees and bagged random forests: deterministic seeded
// training, prediction, impurity-based feature importance, and line-oriented
// text persistence.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dds/csv.hpp"
#include "dds/random.hpp"
#include "dds/trace.hpp"

namespace dds {

struct ForestConfig {
  int n_trees = 100;
  int feature_subset = 4;  // features considered per split; floor(log2(10)) + 1
  int min_leaf = 1;
  int max_depth = -1;  // < 0: unbounded
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

inline void validate(const ForestConfig& cfg) {
  if (cfg.n_trees < 1) throw std::invalid_argument("forest config: n_trees must be >= 1");
  if (cfg.feature_subset < 1 || cfg.feature_subset > kFeatureCount)
    throw std::invalid_argument("forest config: feature_subset must be in [1, 10]");
  if (cfg.min_leaf < 1) throw std::invalid_argument("forest config: min_leaf must be >= 1");
}

// Tree node; feature < 0 marks a leaf carrying the mean label of the samples
// routed to it. Split nodes route x[feature] <= threshold to the left child.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;     // leaf mean (kept for split nodes too, as the node mean)
  int count = 0;        // samples routed here
  double decrease = 0;  // impurity decrease of the split; training-time only
  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // pre-order, root at index 0
  std::uint64_t rng_seed = 0;

  double predict(const FeatureVector& x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
      const TreeNode& n = nodes[static_cast<std::size_t>(i)];
      i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }

  std::size_t leaf_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.is_leaf();
    return c;
  }
};

struct RandomForest {
  std::vector<RegressionTree> trees;
  ForestConfig config;
};

namespace detail {

// Population variance of the labels at idx, two-pass, in index order.
inline double node_variance(const Dataset& d, const std::vector<int>& idx) {
  double sum = 0;
  for (int i : idx) sum += d.records[static_cast<std::size_t>(i)].datarate;
  const double mean = sum / static_cast<double>(idx.size());
  double ss = 0;
  for (int i : idx) {
    const double e = d.records[static_cast<std::size_t>(i)].datarate - mean;
    ss += e * e;
  }
  return ss / static_cast<double>(idx.size());
}

// Weighted sum of child label variances for the split (feature, threshold),
// computed over the node's samples in index order. Candidates are always
// compared through this one routine so that splits inducing the same
// partition compare exactly equal, no matter how they were found.
inline double split_score(const Dataset& d, const std::vector<int>& idx, int feature,
                          double threshold) {
  double sum_l = 0, sum_r = 0;
  std::size_t n_l = 0, n_r = 0;
  for (int i : idx) {
    const auto& rec = d.records[static_cast<std::size_t>(i)];
    if (rec.features[feature] <= threshold) {
      sum_l += rec.datarate;
      ++n_l;
    } else {
      sum_r += rec.datarate;
      ++n_r;
    }
  }
  const double mean_l = n_l ? sum_l / static_cast<double>(n_l) : 0.0;
  const double mean_r = n_r ? sum_r / static_cast<double>(n_r) : 0.0;
  double ss_l = 0, ss_r = 0;
  for (int i : idx) {
    const auto& rec = d.records[static_cast<std::size_t>(i)];
    if (rec.features[feature] <= threshold) {
      const double e = rec.datarate - mean_l;
      ss_l += e * e;
    } else {
      const double e = rec.datarate - mean_r;
      ss_r += e * e;
    }
  }
  return (ss_l + ss_r) / static_cast<double>(idx.size());
}

// Best threshold for one feature, found by a prefix-sum scan over the
// feature-sorted samples. Candidate thresholds are midpoints between
// consecutive distinct values; both children must keep >= min_leaf samples.
inline bool best_threshold_for_feature(const Dataset& d, const std::vector<int>& idx, int feature,
                                       int min_leaf, double& out_threshold) {
  const std::size_t n = idx.size();
  std::vector<std::pair<double, double>> xy;  // (feature value, label)
  xy.reserve(n);
  for (int i : idx) {
    const auto& rec = d.records[static_cast<std::size_t>(i)];
    xy.emplace_back(rec.features[feature], rec.datarate);
  }
  std::sort(xy.begin(), xy.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double total_y = 0, total_yy = 0;
  for (const auto& [x, y] : xy) {
    total_y += y;
    total_yy += y * y;
  }

  bool found = false;
  double best_sse = std::numeric_limits<double>::infinity();
  double sy = 0, syy = 0;
  const auto lo = static_cast<std::size_t>(min_leaf);
  for (std::size_t p = 1; p < n; ++p) {
    sy += xy[p - 1].second;
    syy += xy[p - 1].second * xy[p - 1].second;
    if (p < lo || n - p < lo) continue;
    if (!(xy[p - 1].first < xy[p].first)) continue;
    const auto nl = static_cast<double>(p);
    const auto nr = static_cast<double>(n - p);
    const double sse = (syy - sy * sy / nl) + ((total_yy - syy) - (total_y - sy) * (total_y - sy) / nr);
    if (sse < best_sse) {
      best_sse = sse;
      out_threshold = (xy[p - 1].first + xy[p].first) / 2.0;
      found = true;
    }
  }
  return found;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& d, const ForestConfig& cfg, std::uint64_t tree_seed)
      : d_(d), cfg_(cfg), tree_seed_(tree_seed) {}

  RegressionTree build() {
    std::vector<int> idx(d_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    RegressionTree tree;
    tree.rng_seed = tree_seed_;
    grow(idx, 0);
    tree.nodes = std::move(nodes_);
    return tree;
  }

 private:
  int grow(const std::vector<int>& idx, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    double sum = 0;
    for (int i : idx) sum += d_.records[static_cast<std::size_t>(i)].datarate;
    nodes_[static_cast<std::size_t>(id)].value = sum / static_cast<double>(idx.size());
    nodes_[static_cast<std::size_t>(id)].count = static_cast<int>(idx.size());

    const double first = d_.records[static_cast<std::size_t>(idx.front())].datarate;
    bool pure = true;
    for (int i : idx)
      if (d_.records[static_cast<std::size_t>(i)].datarate != first) {
        pure = false;
        break;
      }
    if (pure || static_cast<int>(idx.size()) < 2 * cfg_.min_leaf ||
        (cfg_.max_depth >= 0 && depth >= cfg_.max_depth))
      return id;

    // Features considered at this node, drawn with the node's own sub-seed
    // so growth is independent of evaluation order.
    std::vector<int> feats;
    if (cfg_.feature_subset >= kFeatureCount) {
      feats.resize(kFeatureCount);
      for (int f = 0; f < kFeatureCount; ++f) feats[static_cast<std::size_t>(f)] = f;
    } else {
      Rng node_rng(derive_seed(tree_seed_, seed_stream::node_base + static_cast<std::uint64_t>(id)));
      feats = sample_without_replacement(kFeatureCount, cfg_.feature_subset, node_rng);
    }

    // Per-feature winners come from the fast scan; the final choice across
    // features re-scores them canonically. Ties go to the lowest feature
    // index, then the lowest threshold.
    int best_feature = -1;
    double best_threshold = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int f : feats) {
      double thr = 0;
      if (!best_threshold_for_feature(d_, idx, f, cfg_.min_leaf, thr)) continue;
      const double score = split_score(d_, idx, f, thr);
      if (score < best_score) {
        best_score = score;
        best_feature = f;
        best_threshold = thr;
      }
    }
    if (best_feature < 0) return id;
    const double parent_var = node_variance(d_, idx);
    if (!(parent_var - best_score > 0)) return id;

    std::vector<int> left, right;
    left.reserve(idx.size());
    right.reserve(idx.size());
    for (int i : idx)
      (d_.records[static_cast<std::size_t>(i)].features[best_feature] <= best_threshold ? left
                                                                                        : right)
          .push_back(i);
    if (static_cast<int>(left.size()) < cfg_.min_leaf ||
        static_cast<int>(right.size()) < cfg_.min_leaf)
      return id;

    nodes_[static_cast<std::size_t>(id)].feature = best_feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
    nodes_[static_cast<std::size_t>(id)].decrease = parent_var - best_score;
    const int l = grow(left, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    const int r = grow(right, depth + 1);
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const Dataset& d_;
  const ForestConfig& cfg_;
  std::uint64_t tree_seed_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

// Bootstrap resample indices for one tree, ascending, |d| draws with
// replacement. Exposed so out-of-bag sets can be reconstructed from seeds.
inline std::vector<int> bootstrap_indices(std::uint64_t tree_seed, std::size_t n) {
  Rng rng(derive_seed(tree_seed, seed_stream::bootstrap));
  std::vector<int> out(n);
  for (auto& v : out) v = static_cast<int>(rng.below(n));
  std::sort(out.begin(), out.end());
  return out;
}

// Greedy top-down CART growth, deterministic for a fixed seed.
inline RegressionTree train_tree(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  if (d.empty()) throw std::invalid_argument("train_tree: empty dataset");
  return detail::TreeBuilder(d, cfg, seed).build();
}

// Bagged ensemble. Per-tree seeds are derived from (config.seed, tree index),
// so the result is independent of evaluation order and worker count.
inline RandomForest train_forest(const Dataset& d, const ForestConfig& cfg) {
  validate(cfg);
  if (d.empty()) throw std::invalid_argument("train_forest: empty dataset");

  RandomForest forest;
  forest.config = cfg;
  forest.trees.resize(static_cast<std::size_t>(cfg.n_trees));

  auto build_one = [&](int t) {
    const std::uint64_t tree_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    if (cfg.bootstrap) {
      Dataset resampled;
      resampled.records.reserve(d.size());
      for (int i : bootstrap_indices(tree_seed, d.size()))
        resampled.add(d.records[static_cast<std::size_t>(i)]);
      forest.trees[static_cast<std::size_t>(t)] = train_tree(resampled, cfg, tree_seed);
    } else {
      forest.trees[static_cast<std::size_t>(t)] = train_tree(d, cfg, tree_seed);
    }
  };

  const unsigned workers =
      std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(cfg.n_trees));
  if (workers <= 1 || cfg.n_trees < 4) {
    for (int t = 0; t < cfg.n_trees; ++t) build_one(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < cfg.n_trees; t = next.fetch_add(1)) build_one(t);
      });
    for (auto& th : pool) th.join();
  }
  return forest;
}

// Mean of the per-tree leaf values reached by x.
inline double predict(const RandomForest& f, const FeatureVector& x) {
  double acc = 0;
  for (const auto& t : f.trees) acc += t.predict(x);
  return acc / static_cast<double>(f.trees.size());
}

inline std::size_t leaf_count(const RandomForest& f) {
  std::size_t c = 0;
  for (const auto& t : f.trees) c += t.leaf_count();
  return c;
}

// Mean-decrease-impurity importance: per feature, the sum over split nodes of
// (node sample fraction x variance decrease), averaged over trees and
// normalized to sum 1. All zero when no splits exist.
inline std::array<double, kFeatureCount> feature_importance(const RandomForest& f) {
  std::array<double, kFeatureCount> avg{};
  for (const auto& t : f.trees) {
    const double root_count = t.nodes.front().count;
    for (const auto& n : t.nodes)
      if (!n.is_leaf())
        avg[static_cast<std::size_t>(n.feature)] +=
            (static_cast<double>(n.count) / root_count) * n.decrease /
            static_cast<double>(f.trees.size());
  }
  double total = 0;
  for (double v : avg) total += v;
  if (total > 0)
    for (double& v : avg) v /= total;
  return avg;
}

// --- persistence ------------------------------------------------------
//
// Line-oriented text, one node per line in pre-order:
//   S <feature_index> <threshold>
//   L <value> <count>
// A forest file is `FOREST <n_trees> <seed>` followed by the trees, each
// introduced by `TREE <i>`.

namespace detail {

inline void write_node(const RegressionTree& t, int id, std::string& out) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(id)];
  if (n.is_leaf()) {
    out += "L " + format_double(n.value) + " " + std::to_string(n.count) + "\n";
  } else {
    out += "S " + std::to_string(n.feature) + " " + format_double(n.threshold) + "\n";
    write_node(t, n.left, out);
    write_node(t, n.right, out);
  }
}

// Reads one pre-order node; returns its id and the subtree's total count.
inline std::pair<int, int> read_node(std::istream& in, RegressionTree& t, const std::string& ctx) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(ctx + ": truncated tree");
  std::istringstream ls(line);
  std::string tag;
  ls >> tag;
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (tag == "L") {
    std::string value_text;
    int count = 0;
    if (!(ls >> value_text >> count)) throw std::runtime_error(ctx + ": malformed leaf line");
    double value = 0;
    if (!parse_double(value_text, value))
      throw std::runtime_error(ctx + ": malformed leaf value '" + value_text + "'");
    t.nodes[static_cast<std::size_t>(id)].value = value;
    t.nodes[static_cast<std::size_t>(id)].count = count;
    return {id, count};
  }
  if (tag == "S") {
    int feature = -1;
    std::string thr_text;
    if (!(ls >> feature >> thr_text)) throw std::runtime_error(ctx + ": malformed split line");
    if (feature < 0 || feature >= kFeatureCount)
      throw std::runtime_error(ctx + ": split feature index out of range");
    double thr = 0;
    if (!parse_double(thr_text, thr))
      throw std::runtime_error(ctx + ": malformed split threshold '" + thr_text + "'");
    t.nodes[static_cast<std::size_t>(id)].feature = feature;
    t.nodes[static_cast<std::size_t>(id)].threshold = thr;
    const auto [l, lc] = read_node(in, t, ctx);
    const auto [r, rc] = read_node(in, t, ctx);
    t.nodes[static_cast<std::size_t>(id)].left = l;
    t.nodes[static_cast<std::size_t>(id)].right = r;
    t.nodes[static_cast<std::size_t>(id)].count = lc + rc;
    return {id, lc + rc};
  }
  throw std::runtime_error(ctx + ": unexpected node tag '" + tag + "'");
}

}  // namespace detail

inline std::string serialize_forest(const RandomForest& f) {
  std::string out = "FOREST " + std::to_string(f.trees.size()) + " " +
                    std::to_string(f.config.seed) + "\n";
  for (std::size_t i = 0; i < f.trees.size(); ++i) {
    out += "TREE " + std::to_string(i) + "\n";
    detail::write_node(f.trees[i], 0, out);
  }
  return out;
}

inline void save_forest(const std::string& path, const RandomForest& f) {
  write_text_file(path, serialize_forest(f));
}

// Structure-only load: node layout, thresholds and leaf statistics are
// restored exactly; training-time impurity decreases are not part of the
// format, so feature importances are only reported when a model is trained.
inline RandomForest load_forest(std::istream& in, const std::string& ctx) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(ctx + ": empty forest file");
  std::istringstream hs(line);
  std::string tag;
  std::size_t n_trees = 0;
  std::uint64_t seed = 0;
  hs >> tag >> n_trees >> seed;
  if (tag != "FOREST" || n_trees == 0)
    throw std::runtime_error(ctx + ": malformed forest header '" + line + "'");

  RandomForest f;
  f.config.seed = seed;
  f.config.n_trees = static_cast<int>(n_trees);
  f.trees.reserve(n_trees);
  for (std::size_t i = 0; i < n_trees; ++i) {
    if (!std::getline(in, line) || line != "TREE " + std::to_string(i))
      throw std::runtime_error(ctx + ": expected 'TREE " + std::to_string(i) + "'");
    RegressionTree t;
    detail::read_node(in, t, ctx);
    f.trees.push_back(std::move(t));
  }
  return f;
}

inline RandomForest load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return load_forest(in, path);
}

}  // namespace dds
