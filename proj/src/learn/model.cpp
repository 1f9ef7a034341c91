// Copyright 2026 The bizsurv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bizsurv/learn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <Eigen/Dense>

#include "bizsurv/common/error.hpp"
#include "bizsurv/common/hash.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/common/rng.hpp"

namespace bizsurv::learn {
using nlohmann::json;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;

ConstMap view(const Matrix& X) { return ConstMap(X.data().data(), X.rows(), X.cols()); }

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Mean log-loss of raw scores z against labels.
double mean_log_loss(std::span<const double> z, std::span<const int> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += softplus(z[i]) - y[i] * z[i];
  return z.empty() ? 0.0 : s / static_cast<double>(z.size());
}

double prior_logit(std::span<const int> y) {
  double pos = 0.0;
  for (int v : y) pos += v;
  double p = y.empty() ? 0.5 : pos / static_cast<double>(y.size());
  p = std::clamp(p, 1e-3, 1.0 - 1e-3);
  return std::log(p / (1.0 - p));
}

void check_finite(double loss, const std::string& where) {
  if (!std::isfinite(loss)) throw DataError("non-finite training loss in " + where);
}

// ---- logistic regression --------------------------------------------------

struct LrObjective {
  ConstMap X;
  Eigen::VectorXd y;
  double l2;

  double eval(const Eigen::VectorXd& w, double b, Eigen::VectorXd* gw, double* gb) const {
    Eigen::VectorXd z = X * w;
    z.array() += b;
    const auto n = static_cast<double>(X.rows());
    double loss = 0.0;
    Eigen::VectorXd r(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      loss += softplus(z[i]) - y[i] * z[i];
      r[i] = sigmoid(z[i]) - y[i];
    }
    loss = loss / n + 0.5 * l2 * w.squaredNorm();
    if (gw) {
      *gw = X.transpose() * r / n + l2 * w;
      *gb = r.sum() / n;
    }
    return loss;
  }
};

// ---- gradient boosting ------------------------------------------------------

struct Binned {
  std::vector<std::vector<double>> thresholds;  // per feature, ascending
  std::vector<std::vector<std::uint16_t>> bins;  // per feature, per row
};

Binned bin_features(const Matrix& X, int max_bins) {
  const std::size_t n = X.rows(), d = X.cols();
  Binned b;
  b.thresholds.resize(d);
  b.bins.assign(d, std::vector<std::uint16_t>(n));
  std::vector<double> col(n);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t r = 0; r < n; ++r) col[r] = X(r, f);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> uniq = sorted;
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    auto& th = b.thresholds[f];
    if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t i = 0; i + 1 < uniq.size(); ++i) th.push_back(uniq[i] + (uniq[i + 1] - uniq[i]) / 2);
    } else {
      for (int q = 1; q < max_bins; ++q) {
        double v = sorted[static_cast<std::size_t>(q) * n / static_cast<std::size_t>(max_bins)];
        if (v < uniq.back() && (th.empty() || v > th.back())) th.push_back(v);
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      b.bins[f][r] = static_cast<std::uint16_t>(std::lower_bound(th.begin(), th.end(), col[r]) - th.begin());
    }
  }
  return b;
}

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;
};

class TreeBuilder {
 public:
  TreeBuilder(const Binned& binned, const std::vector<double>& g, const std::vector<double>& h,
              const GbdtParams& p)
      : binned_(binned), g_(g), h_(h), p_(p) {}

  // Returns the tree and the leaf index of every training row.
  Tree build(std::vector<int>& leaf_of_row) {
    Tree tree;
    std::vector<std::size_t> all(g_.size());
    std::iota(all.begin(), all.end(), 0);
    leaf_of_row.assign(g_.size(), 0);
    grow(tree, std::move(all), 0, leaf_of_row);
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<std::size_t> rows, int depth, std::vector<int>& leaf_of_row) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double G = 0.0, H = 0.0;
    for (std::size_t r : rows) {
      G += g_[r];
      H += h_[r];
    }
    SplitChoice best;
    if (depth < p_.depth && rows.size() >= 2) best = find_split(rows, G, H);
    if (best.feature < 0) {
      tree.nodes[id].value = -G / (H + p_.lambda) * p_.learning_rate;
      for (std::size_t r : rows) leaf_of_row[r] = id;
      return id;
    }
    const auto& th = binned_.thresholds[best.feature];
    const auto& col = binned_.bins[best.feature];
    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (col[r] <= best.bin ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    tree.nodes[id].feature = best.feature;
    tree.nodes[id].threshold = th[best.bin];
    int l = grow(tree, std::move(left), depth + 1, leaf_of_row);
    int r = grow(tree, std::move(right), depth + 1, leaf_of_row);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  SplitChoice find_split(const std::vector<std::size_t>& rows, double G, double H) {
    SplitChoice best;
    const double parent = G * G / (H + p_.lambda);
    std::vector<double> hg, hh;
    for (std::size_t f = 0; f < binned_.bins.size(); ++f) {
      const std::size_t nb = binned_.thresholds[f].size() + 1;
      if (nb < 2) continue;
      hg.assign(nb, 0.0);
      hh.assign(nb, 0.0);
      const auto& col = binned_.bins[f];
      for (std::size_t r : rows) {
        hg[col[r]] += g_[r];
        hh[col[r]] += h_[r];
      }
      double gl = 0.0, hl = 0.0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += hg[b];
        hl += hh[b];
        const double gr = G - gl, hr = H - hl;
        if (hl < p_.min_child_hessian || hr < p_.min_child_hessian) continue;
        const double gain = gl * gl / (hl + p_.lambda) + gr * gr / (hr + p_.lambda) - parent;
        if (gain > best.gain + 1e-12) {
          best = {gain, static_cast<int>(f), static_cast<int>(b)};
        }
      }
    }
    return best;
  }

  const Binned& binned_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  const GbdtParams& p_;
};

// ---- multilayer perceptron ----------------------------------------------------

struct MlpView {
  Eigen::Map<const RowMatrix> W1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::VectorXd> w2;
  double b2;

  explicit MlpView(const MlpNet& net)
      : W1(net.params.data(), net.hidden, net.inputs),
        b1(net.params.data() + net.hidden * net.inputs, net.hidden),
        w2(net.params.data() + net.hidden * net.inputs + net.hidden, net.hidden),
        b2(net.params.back()) {}
};

// Loss and gradient over a batch of rows. grad layout matches MlpNet::params.
template <typename Rows>
double mlp_batch(const MlpNet& net, const Rows& X, const Eigen::VectorXd& y, double l2,
                 std::vector<double>* grad) {
  MlpView v(net);
  const auto B = static_cast<double>(X.rows());
  RowMatrix Z1 = X * v.W1.transpose();
  Z1.rowwise() += v.b1.transpose();
  RowMatrix A1 = Z1.cwiseMax(0.0);
  Eigen::VectorXd z2 = A1 * v.w2;
  z2.array() += v.b2;
  double loss = 0.0;
  Eigen::VectorXd d2(z2.size());
  for (Eigen::Index i = 0; i < z2.size(); ++i) {
    loss += softplus(z2[i]) - y[i] * z2[i];
    d2[i] = (sigmoid(z2[i]) - y[i]) / B;
  }
  loss = loss / B + 0.5 * l2 * (v.W1.squaredNorm() + v.w2.squaredNorm());
  if (grad) {
    grad->resize(net.param_count());
    const std::size_t h = net.hidden, d = net.inputs;
    Eigen::Map<RowMatrix> gW1(grad->data(), h, d);
    Eigen::Map<Eigen::VectorXd> gb1(grad->data() + h * d, h);
    Eigen::Map<Eigen::VectorXd> gw2(grad->data() + h * d + h, h);
    RowMatrix dA1 = d2 * v.w2.transpose();
    dA1.array() *= (Z1.array() > 0.0).cast<double>();
    gW1.noalias() = dA1.transpose() * X;
    gW1 += l2 * v.W1;
    gb1 = dA1.colwise().sum().transpose();
    gw2.noalias() = A1.transpose() * d2;
    gw2 += l2 * v.w2;
    grad->back() = d2.sum();
  }
  return loss;
}

json tree_to_json(const Tree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

Tree tree_from_json(const json& j) {
  Tree t;
  const auto& f = j.at("feature");
  t.nodes.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto& n = t.nodes[i];
    n.feature = f[i].get<int>();
    n.threshold = j.at("threshold")[i].get<double>();
    n.left = j.at("left")[i].get<int>();
    n.right = j.at("right")[i].get<int>();
    n.value = j.at("value")[i].get<double>();
    if (n.feature >= 0 && (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) ||
                           n.left >= static_cast<int>(f.size()) || n.right >= static_cast<int>(f.size()))) {
      throw DataError("corrupt tree structure in model");
    }
  }
  return t;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LR: return "LR";
    case ModelKind::GBDT: return "GBDT";
    case ModelKind::MLP: return "MLP";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  std::string up(name);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "LR") return ModelKind::LR;
  if (up == "GBDT") return ModelKind::GBDT;
  if (up == "MLP") return ModelKind::MLP;
  return std::nullopt;
}

json to_json(const HyperParams& h) {
  return json{{"lr", {{"l2", h.lr.l2}, {"max_iter", h.lr.max_iter}, {"tolerance", h.lr.tolerance}}},
              {"gbdt",
               {{"trees", h.gbdt.trees},
                {"depth", h.gbdt.depth},
                {"learning_rate", h.gbdt.learning_rate},
                {"max_bins", h.gbdt.max_bins},
                {"lambda", h.gbdt.lambda},
                {"min_child_hessian", h.gbdt.min_child_hessian}}},
              {"mlp",
               {{"hidden", h.mlp.hidden},
                {"epochs", h.mlp.epochs},
                {"batch_size", h.mlp.batch_size},
                {"learning_rate", h.mlp.learning_rate},
                {"momentum", h.mlp.momentum},
                {"l2", h.mlp.l2}}}};
}

double LinearModel::score(std::span<const double> x) const {
  double z = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * x[i];
  return z;
}

double Tree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].value;
}

double GbdtModel::score(std::span<const double> x) const {
  double z = base_score;
  for (const auto& t : trees) z += t.predict(x);
  return z;
}

MlpNet::MlpNet(std::size_t in, std::size_t hid) : inputs(in), hidden(hid), params(param_count(), 0.0) {}

double MlpNet::score(std::span<const double> x) const {
  MlpView v(*this);
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd a = (v.W1 * xv + v.b1).cwiseMax(0.0);
  return a.dot(v.w2) + v.b2;
}

double MlpNet::loss(const Matrix& X, std::span<const int> y, double l2, std::vector<double>* grad) const {
  Eigen::VectorXd yv(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) yv[static_cast<Eigen::Index>(i)] = y[i];
  return mlp_batch(*this, view(X), yv, l2, grad);
}

LinearModel train_lr(const Matrix& Xs, std::span<const int> y, const LrParams& params) {
  const auto d = static_cast<Eigen::Index>(Xs.cols());
  LrObjective obj{view(Xs), Eigen::VectorXd(static_cast<Eigen::Index>(y.size())), params.l2};
  for (std::size_t i = 0; i < y.size(); ++i) obj.y[static_cast<Eigen::Index>(i)] = y[i];
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d), gw;
  double b = prior_logit(y), gb = 0.0;
  double loss = obj.eval(w, b, &gw, &gb);
  check_finite(loss, "logistic regression (initial)");
  double step = 1.0;
  for (int it = 0; it < params.max_iter; ++it) {
    const double gnorm2 = gw.squaredNorm() + gb * gb;
    if (std::sqrt(gnorm2) < params.tolerance) break;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      Eigen::VectorXd w_new = w - step * gw;
      double b_new = b - step * gb;
      double loss_new = obj.eval(w_new, b_new, nullptr, nullptr);
      if (std::isfinite(loss_new) && loss_new <= loss - 0.5 * step * gnorm2) {
        w = std::move(w_new);
        b = b_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    loss = obj.eval(w, b, &gw, &gb);
    check_finite(loss, "logistic regression (iteration " + std::to_string(it) + ")");
    step = std::min(step * 2.0, 1e4);
  }
  LinearModel m;
  m.weights.assign(w.data(), w.data() + w.size());
  m.bias = b;
  return m;
}

GbdtModel train_gbdt(const Matrix& X, std::span<const int> y, const GbdtParams& params) {
  const std::size_t n = X.rows();
  GbdtModel model;
  model.base_score = prior_logit(y);
  std::vector<double> z(n, model.base_score), g(n), h(n), z_new(n);
  double loss = mean_log_loss(z, y);
  model.train_loss.push_back(loss);
  if (n == 0) return model;
  const Binned binned = bin_features(X, std::clamp(params.max_bins, 2, 256));
  std::vector<int> leaf_of_row;
  for (int t = 0; t < params.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(z[i]);
      g[i] = p - y[i];
      h[i] = std::max(p * (1.0 - p), 1e-16);
    }
    TreeBuilder builder(binned, g, h, params);
    Tree tree = builder.build(leaf_of_row);
    // Shrink the step until the round does not increase the training loss.
    double loss_new = loss;
    bool improved = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) z_new[i] = z[i] + tree.nodes[leaf_of_row[i]].value;
      loss_new = mean_log_loss(z_new, y);
      if (loss_new <= loss) {
        improved = true;
        break;
      }
      for (auto& node : tree.nodes) node.value *= 0.5;
    }
    check_finite(loss_new, "gradient boosting (round " + std::to_string(t) + ")");
    if (!improved) {
      for (auto& node : tree.nodes) node.value = 0.0;
      loss_new = loss;
    } else {
      z.swap(z_new);
    }
    loss = loss_new;
    model.train_loss.push_back(loss);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

MlpNet train_mlp(const Matrix& Xs, std::span<const int> y, const MlpParams& params, std::uint64_t seed) {
  const std::size_t n = Xs.rows(), d = Xs.cols(), hdim = static_cast<std::size_t>(params.hidden);
  MlpNet net(d, hdim);
  Rng rng(seed);
  const double s1 = std::sqrt(2.0 / std::max<std::size_t>(d, 1));
  const double s2 = std::sqrt(1.0 / std::max<std::size_t>(hdim, 1));
  for (std::size_t i = 0; i < hdim * d; ++i) net.params[i] = rng.normal(0.0, s1);
  for (std::size_t i = 0; i < hdim; ++i) net.params[hdim * d + hdim + i] = rng.normal(0.0, s2);
  net.params.back() = prior_logit(y);
  if (n == 0) return net;

  const ConstMap X = view(Xs);
  std::vector<double> velocity(net.param_count(), 0.0), grad;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, params.batch_size));
  RowMatrix Xb;
  Eigen::VectorXd yb;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const auto B = static_cast<Eigen::Index>(end - start);
      Xb.resize(B, static_cast<Eigen::Index>(d));
      yb.resize(B);
      for (std::size_t k = start; k < end; ++k) {
        Xb.row(static_cast<Eigen::Index>(k - start)) = X.row(static_cast<Eigen::Index>(order[k]));
        yb[static_cast<Eigen::Index>(k - start)] = y[order[k]];
      }
      double l = mlp_batch(net, Xb, yb, params.l2, &grad);
      epoch_loss += l * static_cast<double>(B);
      for (std::size_t p = 0; p < grad.size(); ++p) {
        velocity[p] = params.momentum * velocity[p] - params.learning_rate * grad[p];
        net.params[p] += velocity[p];
      }
    }
    check_finite(epoch_loss, "multilayer perceptron (epoch " + std::to_string(epoch) +
                                 ", learning rate " + format_double(params.learning_rate) + ")");
  }
  return net;
}

TrainedModel::TrainedModel(ModelKind kind, std::vector<std::string> columns, Standardizer standardizer,
                           Body body, std::uint64_t seed)
    : kind_(kind),
      columns_(std::move(columns)),
      fingerprint_(schema_fingerprint(columns_)),
      standardizer_(std::move(standardizer)),
      body_(std::move(body)),
      seed_(seed) {}

double TrainedModel::predict_one(std::span<const double> x) const {
  if (x.size() != columns_.size()) {
    throw DataError("model expects " + std::to_string(columns_.size()) + " features, got " +
                    std::to_string(x.size()));
  }
  if (const auto* g = std::get_if<GbdtModel>(&body_)) return sigmoid(g->score(x));
  std::vector<double> z(x.size());
  if (standardizer_.empty()) {
    std::copy(x.begin(), x.end(), z.begin());
  } else {
    standardizer_.apply_row(x, z);
  }
  if (const auto* l = std::get_if<LinearModel>(&body_)) return sigmoid(l->score(z));
  return sigmoid(std::get<MlpNet>(body_).score(z));
}

std::vector<double> TrainedModel::predict_rows(const Matrix& X) const {
  if (X.rows() > 0 && X.cols() != columns_.size()) {
    throw DataError("model expects " + std::to_string(columns_.size()) + " features, got " +
                    std::to_string(X.cols()));
  }
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_one(X.row(r));
  return out;
}

std::vector<double> TrainedModel::predict_proba(const Dataset& data) const {
  if (schema_fingerprint(data.columns) != fingerprint_) {
    throw DataError("feature schema " + to_hex(schema_fingerprint(data.columns)) +
                    " does not match the model's schema " + to_hex(fingerprint_));
  }
  return predict_rows(data.X);
}

json TrainedModel::to_json() const {
  json j;
  j["kind"] = to_string(kind_);
  j["columns"] = columns_;
  j["fingerprint"] = to_hex(fingerprint_);
  j["seed"] = seed_;
  j["standardizer"] = {{"mean", standardizer_.mean}, {"scale", standardizer_.scale}};
  if (const auto* l = std::get_if<LinearModel>(&body_)) {
    j["body"] = {{"weights", l->weights}, {"bias", l->bias}};
  } else if (const auto* g = std::get_if<GbdtModel>(&body_)) {
    json trees = json::array();
    for (const auto& t : g->trees) trees.push_back(tree_to_json(t));
    j["body"] = {{"base_score", g->base_score}, {"trees", trees}, {"train_loss", g->train_loss}};
  } else {
    const auto& m = std::get<MlpNet>(body_);
    j["body"] = {{"inputs", m.inputs}, {"hidden", m.hidden}, {"params", m.params}};
  }
  return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
  try {
    auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw DataError("unknown model kind " + j.at("kind").dump());
    auto columns = j.at("columns").get<std::vector<std::string>>();
    Standardizer s;
    s.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    s.scale = j.at("standardizer").at("scale").get<std::vector<double>>();
    const auto& b = j.at("body");
    Body body;
    if (*kind == ModelKind::LR) {
      LinearModel l;
      l.weights = b.at("weights").get<std::vector<double>>();
      l.bias = b.at("bias").get<double>();
      if (l.weights.size() != columns.size()) throw DataError("weight count does not match schema");
      body = std::move(l);
    } else if (*kind == ModelKind::GBDT) {
      GbdtModel g;
      g.base_score = b.at("base_score").get<double>();
      for (const auto& t : b.at("trees")) g.trees.push_back(tree_from_json(t));
      g.train_loss = b.at("train_loss").get<std::vector<double>>();
      for (const auto& t : g.trees) {
        for (const auto& n : t.nodes) {
          if (n.feature >= static_cast<int>(columns.size())) throw DataError("tree feature out of range");
        }
      }
      body = std::move(g);
    } else {
      MlpNet m(b.at("inputs").get<std::size_t>(), b.at("hidden").get<std::size_t>());
      m.params = b.at("params").get<std::vector<double>>();
      if (m.params.size() != m.param_count() || m.inputs != columns.size()) {
        throw DataError("network shape does not match schema");
      }
      body = std::move(m);
    }
    TrainedModel model(*kind, std::move(columns), std::move(s), std::move(body),
                       j.at("seed").get<std::uint64_t>());
    if (to_hex(model.fingerprint()) != j.at("fingerprint").get<std::string>()) {
      throw DataError("model schema fingerprint does not match its columns");
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }
}

TrainedModel train_classifier(ModelKind kind, const Dataset& train, const HyperParams& hyper,
                              std::uint64_t seed) {
  train.validate();
  if (train.rows() == 0) throw DataError("cannot train on an empty dataset");
  switch (kind) {
    case ModelKind::GBDT:
      return TrainedModel(kind, train.columns, Standardizer{}, train_gbdt(train.X, train.y, hyper.gbdt), seed);
    case ModelKind::LR: {
      auto s = Standardizer::fit(train.X);
      auto body = train_lr(s.apply(train.X), train.y, hyper.lr);
      return TrainedModel(kind, train.columns, std::move(s), std::move(body), seed);
    }
    case ModelKind::MLP: {
      auto s = Standardizer::fit(train.X);
      auto body = train_mlp(s.apply(train.X), train.y, hyper.mlp, seed);
      return TrainedModel(kind, train.columns, std::move(s), std::move(body), seed);
    }
  }
  throw Error("unhandled model kind");
}

namespace {
constexpr char kMagic[8] = {'B', 'S', 'U', 'R', 'V', 'M', 'D', 'L'};

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}
}  // namespace

std::string serialize_model(const TrainedModel& model) {
  auto payload = json::to_cbor(model.to_json());
  std::string out(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint64_t>(out, payload.size());
  out.append(reinterpret_cast<const char*>(payload.data()), payload.size());
  return out;
}

TrainedModel deserialize_model(std::string_view bytes) {
  constexpr std::size_t header = sizeof kMagic + 4 + 8;
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw DataError("not a bizsurv model file");
  }
  auto version = get_le<std::uint32_t>(bytes, sizeof kMagic);
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  auto length = get_le<std::uint64_t>(bytes, sizeof kMagic + 4);
  if (length != bytes.size() - header) throw DataError("truncated model file");
  json j;
  try {
    j = json::from_cbor(bytes.substr(header));
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt model payload: ") + e.what());
  }
  return TrainedModel::from_json(j);
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

}  // namespace bizsurv::learn
