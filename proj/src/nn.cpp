// Copyright 2026 The meshgnn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "meshgnn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include <json.hpp>

namespace meshgnn {

namespace {

void check_layer_shapes(const MatrixX& h, Eigen::Index a_rows, Eigen::Index a_cols,
                        const MatrixX& w) {
  if (a_rows != a_cols || a_cols != h.rows() || h.cols() != w.rows()) {
    throw ValidationError("graph layer shape mismatch: A " + std::to_string(a_rows) + "x" +
                          std::to_string(a_cols) + ", H " + std::to_string(h.rows()) + "x" +
                          std::to_string(h.cols()) + ", W " + std::to_string(w.rows()) + "x" +
                          std::to_string(w.cols()));
  }
}

template <typename AdjT>
MatrixX propagate(const AdjT& a, const MatrixX& h, const MatrixX& w, bool act) {
  MatrixX out = (a * h) * w;
  if (act) out = out.cwiseMax(0.0);
  return out;
}

}  // namespace

MatrixX gnn_layer(const MatrixX& h, const AdjacencyMatrix& a, const MatrixX& w,
                  bool apply_activation) {
  if (a.policy != AdjacencyPolicy::WeightedL2) {
    throw ValidationError("gnn_layer expects a weighted-l2 adjacency");
  }
  check_layer_shapes(h, a.values.rows(), a.values.cols(), w);
  return propagate(a.values, h, w, apply_activation);
}

MatrixX gcn_layer(const MatrixX& h, const AdjacencyMatrix& a, const MatrixX& w,
                  bool apply_activation) {
  if (a.policy != AdjacencyPolicy::GcnNormalized) {
    throw ValidationError("gcn_layer expects a gcn-normalized adjacency");
  }
  check_layer_shapes(h, a.values.rows(), a.values.cols(), w);
  return propagate(a.values, h, w, apply_activation);
}

RowVectorX global_pool(const MatrixX& h) {
  if (h.rows() == 0) throw ValidationError("global_pool on an empty node set");
  return h.colwise().mean();
}

void ModelConfig::validate() const {
  if (input_dim <= 0) throw ValidationError("model input_dim must be positive");
  if (graph_dims.empty()) throw ValidationError("model needs at least one graph layer");
  for (int d : graph_dims) {
    if (d <= 0) throw ValidationError("graph layer sizes must be positive");
  }
  for (int d : dense_dims) {
    if (d <= 0) throw ValidationError("dense layer sizes must be positive");
  }
}

std::vector<MatrixX*> ModelParams::tensors() {
  std::vector<MatrixX*> out;
  for (auto& w : graph_weights) out.push_back(&w);
  for (std::size_t i = 0; i < dense_weights.size(); ++i) {
    out.push_back(&dense_weights[i]);
    out.push_back(&dense_biases[i]);
  }
  return out;
}

std::vector<const MatrixX*> ModelParams::tensors() const {
  std::vector<const MatrixX*> out;
  for (auto* t : const_cast<ModelParams*>(this)->tensors()) out.push_back(t);
  return out;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (auto* t : z.tensors()) t->setZero();
  return z;
}

Eigen::Index ModelParams::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto* t : tensors()) n += t->size();
  return n;
}

bool ModelParams::matches(const ModelConfig& config) const {
  if (graph_weights.size() != config.graph_dims.size()) return false;
  if (dense_weights.size() != config.dense_dims.size() + 1) return false;
  if (dense_biases.size() != dense_weights.size()) return false;
  int in = config.input_dim;
  for (std::size_t l = 0; l < graph_weights.size(); ++l) {
    if (graph_weights[l].rows() != in || graph_weights[l].cols() != config.graph_dims[l]) {
      return false;
    }
    in = config.graph_dims[l];
  }
  for (std::size_t i = 0; i < dense_weights.size(); ++i) {
    const int out = i < config.dense_dims.size() ? config.dense_dims[i] : 1;
    if (dense_weights[i].rows() != in || dense_weights[i].cols() != out) return false;
    if (dense_biases[i].rows() != 1 || dense_biases[i].cols() != out) return false;
    in = out;
  }
  return true;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, "init"));
  auto glorot = [&rng](int fan_in, int fan_out) {
    const Real bound = std::sqrt(6.0 / (fan_in + fan_out));
    MatrixX w(fan_in, fan_out);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = uniform_real(rng, -bound, bound);
    }
    return w;
  };
  ModelParams p;
  int in = config.input_dim;
  for (int d : config.graph_dims) {
    p.graph_weights.push_back(glorot(in, d));
    in = d;
  }
  std::vector<int> dims = config.dense_dims;
  dims.push_back(1);
  for (int d : dims) {
    p.dense_weights.push_back(glorot(in, d));
    p.dense_biases.push_back(MatrixX::Zero(1, d));
    in = d;
  }
  return p;
}

PreparedGraph prepare_graph(const Graph& graph, AdjacencyPolicy policy) {
  return {graph.coords, build_sparse_adjacency(graph, policy)};
}

PreparedGraph prepare_graph(const Graph& graph, const FeatureScaling& scaling,
                            AdjacencyPolicy policy) {
  return {scaling.apply(graph.coords), build_sparse_adjacency(graph, policy)};
}

namespace {

struct ForwardCache {
  std::vector<MatrixX> propagated;  // A H_{l-1}
  std::vector<MatrixX> activations;  // H_l
  std::vector<RowVectorX> dense_inputs;
  Real output = 0;
};

void check_params(const PreparedGraph& g, const ModelParams& p) {
  if (p.graph_weights.empty() || p.dense_weights.empty() ||
      p.dense_weights.size() != p.dense_biases.size()) {
    throw ValidationError("model parameters are incomplete");
  }
  if (g.features.rows() == 0) throw ValidationError("graph has no nodes");
  if (g.adjacency.rows() != g.features.rows() || g.adjacency.cols() != g.features.rows()) {
    throw ValidationError("adjacency does not match node count");
  }
  Eigen::Index in = g.features.cols();
  for (const auto& w : p.graph_weights) {
    if (w.rows() != in) throw ValidationError("graph weight shape mismatch");
    in = w.cols();
  }
  for (std::size_t i = 0; i < p.dense_weights.size(); ++i) {
    if (p.dense_weights[i].rows() != in || p.dense_biases[i].cols() != p.dense_weights[i].cols() ||
        p.dense_biases[i].rows() != 1) {
      throw ValidationError("dense weight shape mismatch");
    }
    in = p.dense_weights[i].cols();
  }
  if (in != 1) throw ValidationError("model output must be a single value");
}

Real forward(const PreparedGraph& g, const ModelParams& p, ForwardCache* cache) {
  check_params(g, p);
  MatrixX h = g.features;
  for (const auto& w : p.graph_weights) {
    MatrixX ah = g.adjacency * h;
    h = (ah * w).cwiseMax(0.0);
    if (cache) {
      cache->propagated.push_back(std::move(ah));
      cache->activations.push_back(h);
    }
  }
  RowVectorX x = global_pool(h);
  const std::size_t last = p.dense_weights.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    if (cache) cache->dense_inputs.push_back(x);
    RowVectorX z = x * p.dense_weights[i] + p.dense_biases[i];
    x = i < last ? RowVectorX(z.cwiseMax(0.0)) : z;
  }
  if (cache) cache->output = x(0);
  return x(0);
}

}  // namespace

Real model_forward(const PreparedGraph& graph, const ModelParams& params) {
  return forward(graph, params, nullptr);
}

Real model_forward(const Graph& graph, const ModelParams& params, AdjacencyPolicy policy) {
  return forward(prepare_graph(graph, policy), params, nullptr);
}

SampleGradient backward(const PreparedGraph& graph, const ModelParams& params, Real y) {
  ForwardCache cache;
  const Real y_hat = forward(graph, params, &cache);
  SampleGradient out;
  out.prediction = y_hat;
  out.loss = (y_hat - y) * (y_hat - y);
  out.grads = params.zeros_like();
  ModelParams& g = out.grads;

  RowVectorX dz = RowVectorX::Constant(1, 2 * (y_hat - y));
  for (std::size_t i = params.dense_weights.size(); i-- > 0;) {
    const RowVectorX& x = cache.dense_inputs[i];
    g.dense_weights[i] = x.transpose() * dz;
    g.dense_biases[i] = dz;
    RowVectorX dx = dz * params.dense_weights[i].transpose();
    if (i > 0) dx = dx.cwiseProduct((x.array() > 0).cast<Real>().matrix());
    dz = std::move(dx);
  }

  const Eigen::Index n = graph.features.rows();
  MatrixX dh = MatrixX::Ones(n, 1) * (dz / static_cast<Real>(n));
  for (std::size_t l = params.graph_weights.size(); l-- > 0;) {
    const MatrixX dpre = dh.cwiseProduct((cache.activations[l].array() > 0).cast<Real>().matrix());
    g.graph_weights[l] = cache.propagated[l].transpose() * dpre;
    if (l > 0) dh = graph.adjacency.transpose() * (dpre * params.graph_weights[l].transpose());
  }
  return out;
}

AdamState adam_init(const ModelParams& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, Real lr,
               const AdamConfig& config) {
  ++state.step;
  const Real c1 = 1 - std::pow(config.beta1, static_cast<Real>(state.step));
  const Real c2 = 1 - std::pow(config.beta2, static_cast<Real>(state.step));
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw ValidationError("adam_step: parameter structure mismatch");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (g[i]->rows() != p[i]->rows() || g[i]->cols() != p[i]->cols()) {
      throw ValidationError("adam_step: gradient shape mismatch");
    }
    m[i]->array() = config.beta1 * m[i]->array() + (1 - config.beta1) * g[i]->array();
    v[i]->array() = config.beta2 * v[i]->array() + (1 - config.beta2) * g[i]->array().square();
    p[i]->array() -=
        lr * (m[i]->array() / c1) / ((v[i]->array() / c2).sqrt() + config.epsilon);
  }
}

EarlyStopping::EarlyStopping(int patience) : patience_(patience) {
  if (patience < 1) throw ValidationError("patience must be at least 1");
}

bool EarlyStopping::observe(Real value) {
  last_improved_ = best_index_ < 0 || value < best_;
  if (last_improved_) {
    best_ = value;
    best_index_ = count_;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  ++count_;
  return since_best_ >= patience_;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be positive");
  }
  if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
  if (max_epochs < 1) throw ValidationError("max_epochs must be at least 1");
  if (patience < 1 || patience > max_epochs) {
    throw ValidationError("patience must lie in [1, max_epochs]");
  }
}

Real dataset_mse(const std::vector<PreparedGraph>& graphs, const std::vector<Real>& scaled_labels,
                 const std::vector<int>& indices, const ModelParams& params) {
  if (indices.empty()) throw ValidationError("dataset_mse over an empty index set");
  Real acc = 0;
  for (int i : indices) {
    const Real e = model_forward(graphs[i], params) - scaled_labels[i];
    acc += e * e;
  }
  return acc / static_cast<Real>(indices.size());
}

TrainResult train(const std::vector<PreparedGraph>& graphs, const std::vector<Real>& scaled_labels,
                  const DatasetSplit& split, const ModelConfig& model, const TrainConfig& config) {
  config.validate();
  model.validate();
  if (graphs.size() != scaled_labels.size()) {
    throw ValidationError("graph and label counts differ");
  }
  if (split.train.empty() || split.validation.empty()) {
    throw ValidationError("training needs non-empty train and validation splits");
  }
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (int i : *part) {
      if (i < 0 || static_cast<std::size_t>(i) >= graphs.size()) {
        throw ValidationError("split index out of range");
      }
    }
  }

  TrainResult result;
  ModelParams params = init_params(model, config.seed);
  AdamState adam = adam_init(params);
  EarlyStopping stopper(config.patience);
  std::vector<int> order = split.train;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_int(rng, 0, i - 1))]);
    }

    Real loss_sum = 0;
    ModelParams accum;
    int in_batch = 0;
    for (std::size_t s = 0; s < order.size(); ++s) {
      const int idx = order[s];
      SampleGradient sg = backward(graphs[idx], params, scaled_labels[idx]);
      if (!std::isfinite(sg.loss)) {
        throw Error("non-finite training loss at epoch " + std::to_string(epoch) + ", sample " +
                    std::to_string(idx));
      }
      loss_sum += sg.loss;
      if (in_batch == 0) {
        accum = std::move(sg.grads);
      } else {
        auto dst = accum.tensors();
        auto src = sg.grads.tensors();
        for (std::size_t t = 0; t < dst.size(); ++t) *dst[t] += *src[t];
      }
      ++in_batch;
      if (in_batch == config.batch_size || s + 1 == order.size()) {
        if (in_batch > 1) {
          for (auto* t : accum.tensors()) *t /= static_cast<Real>(in_batch);
        }
        adam_step(params, accum, adam, config.learning_rate);
        in_batch = 0;
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<Real>(order.size());
    rec.val_loss = dataset_mse(graphs, scaled_labels, split.validation, params);
    if (!std::isfinite(rec.val_loss)) {
      throw Error("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(rec);

    const bool stop = stopper.observe(rec.val_loss);
    if (stopper.improved()) {
      result.params = params;
      result.best_epoch = epoch;
      result.best_val_loss = rec.val_loss;
    }
    result.stopped_epoch = epoch;
    if (stop) break;
  }
  return result;
}

TrainedModel fit_model(const std::vector<Graph>& graphs, const std::vector<Real>& labels,
                       Performance performance, const DatasetSplit& split,
                       const ModelConfig& model, const TrainConfig& config) {
  if (graphs.size() != labels.size()) throw ValidationError("graph and label counts differ");
  TrainedModel out;
  out.model = model;
  out.train = config;
  out.performance = performance;
  ScaledGraphs scaled = scale_node_features(graphs, split.train);
  out.features = scaled.record;
  ScaledLabels y = scale_labels(labels, split.train);
  out.labels = y.record;

  std::vector<PreparedGraph> prepared;
  prepared.reserve(graphs.size());
  for (const Graph& g : graphs) prepared.push_back(prepare_graph(g, out.features, config.policy));

  TrainResult r = train(prepared, y.scaled, split, model, config);
  out.params = std::move(r.params);
  out.history = std::move(r.history);
  out.best_epoch = r.best_epoch;
  out.stopped_epoch = r.stopped_epoch;
  out.best_val_loss = r.best_val_loss;
  return out;
}

std::vector<Real> predict(const TrainedModel& model, const std::vector<Graph>& graphs) {
  std::vector<Real> out;
  out.reserve(graphs.size());
  for (const Graph& g : graphs) {
    out.push_back(model.labels.inverse(
        model_forward(prepare_graph(g, model.features, model.train.policy), model.params)));
  }
  return out;
}

Metrics evaluate(const TrainedModel& model, const std::vector<Graph>& graphs,
                 const std::vector<Real>& labels) {
  if (graphs.size() != labels.size()) throw ValidationError("graph and label counts differ");
  return compute_metrics(labels, predict(model, graphs));
}

// Checkpoint ----------------------------------------------------------------

namespace {

using nlohmann::json;

Real round9(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

json matrix_json(const MatrixX& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(round9(m(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

MatrixX matrix_from_json(const json& j) {
  MatrixX m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const json& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != m.rows()) {
    throw ValidationError("checkpoint matrix row count mismatch");
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (static_cast<Eigen::Index>(data[r].size()) != m.cols()) {
      throw ValidationError("checkpoint matrix column count mismatch");
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = data[r][c].get<Real>();
  }
  return m;
}

json matrices_json(const std::vector<MatrixX>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(matrix_json(m));
  return a;
}

std::vector<MatrixX> matrices_from_json(const json& a) {
  std::vector<MatrixX> out;
  for (const auto& j : a) out.push_back(matrix_from_json(j));
  return out;
}

}  // namespace

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
  json j;
  j["format"] = "meshgnn-checkpoint";
  j["version"] = 1;
  j["performance"] = to_string(model.performance);
  j["model"] = {{"input_dim", model.model.input_dim},
                {"graph_dims", model.model.graph_dims},
                {"dense_dims", model.model.dense_dims}};
  j["train"] = {{"learning_rate", model.train.learning_rate},
                {"batch_size", model.train.batch_size},
                {"max_epochs", model.train.max_epochs},
                {"patience", model.train.patience},
                {"seed", model.train.seed},
                {"adjacency", to_string(model.train.policy)}};
  j["feature_scaling"] = {
      {"min", {model.features.min[0], model.features.min[1], model.features.min[2]}},
      {"max", {model.features.max[0], model.features.max[1], model.features.max[2]}},
      {"warnings", model.features.warnings}};
  j["label_scaling"] = {{"min", model.labels.min}, {"max", model.labels.max}};
  j["params"] = {{"graph_weights", matrices_json(model.params.graph_weights)},
                 {"dense_weights", matrices_json(model.params.dense_weights)},
                 {"dense_biases", matrices_json(model.params.dense_biases)}};
  json hist = json::array();
  for (const auto& r : model.history) {
    hist.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}});
  }
  j["history"] = std::move(hist);
  j["best_epoch"] = model.best_epoch;
  j["stopped_epoch"] = model.stopped_epoch;
  j["best_val_loss"] = model.best_val_loss;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  TrainedModel m;
  try {
    const json j = json::parse(in);
    if (j.at("format") != "meshgnn-checkpoint") throw ValidationError("not a checkpoint file");
    m.performance = performance_from_string(j.at("performance").get<std::string>());
    const json& mc = j.at("model");
    m.model.input_dim = mc.at("input_dim").get<int>();
    m.model.graph_dims = mc.at("graph_dims").get<std::vector<int>>();
    m.model.dense_dims = mc.at("dense_dims").get<std::vector<int>>();
    const json& tc = j.at("train");
    m.train.learning_rate = tc.at("learning_rate").get<Real>();
    m.train.batch_size = tc.at("batch_size").get<int>();
    m.train.max_epochs = tc.at("max_epochs").get<int>();
    m.train.patience = tc.at("patience").get<int>();
    m.train.seed = tc.at("seed").get<std::uint64_t>();
    m.train.policy = adjacency_policy_from_string(tc.at("adjacency").get<std::string>());
    const json& fs = j.at("feature_scaling");
    for (int a = 0; a < 3; ++a) {
      m.features.min[a] = fs.at("min").at(a).get<Real>();
      m.features.max[a] = fs.at("max").at(a).get<Real>();
    }
    m.features.warnings = fs.at("warnings").get<std::vector<std::string>>();
    m.labels.min = j.at("label_scaling").at("min").get<Real>();
    m.labels.max = j.at("label_scaling").at("max").get<Real>();
    const json& p = j.at("params");
    m.params.graph_weights = matrices_from_json(p.at("graph_weights"));
    m.params.dense_weights = matrices_from_json(p.at("dense_weights"));
    m.params.dense_biases = matrices_from_json(p.at("dense_biases"));
    for (const auto& r : j.at("history")) {
      m.history.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<Real>(),
                           r.at("val_loss").get<Real>()});
    }
    m.best_epoch = j.at("best_epoch").get<int>();
    m.stopped_epoch = j.at("stopped_epoch").get<int>();
    m.best_val_loss = j.at("best_val_loss").get<Real>();
  } catch (const json::exception& e) {
    throw ValidationError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  m.model.validate();
  m.train.validate();
  if (!m.params.matches(m.model)) throw ValidationError("checkpoint weights do not match config");
  return m;
}

}  // namespace meshgnn
