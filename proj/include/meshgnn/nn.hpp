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

#ifndef MESHGNN_NN_HPP
#define MESHGNN_NN_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/SparseCore>

#include "meshgnn/graph.hpp"
#include "meshgnn/labels.hpp"
#include "meshgnn/metrics.hpp"

namespace meshgnn {

using RowVectorX = Eigen::Matrix<Real, 1, Eigen::Dynamic>;
using SparseMatrixX = Eigen::SparseMatrix<Real>;

// Layers --------------------------------------------------------------------

/// sigma(A H W) with the distance-weighted adjacency.
MatrixX gnn_layer(const MatrixX& h, const AdjacencyMatrix& a, const MatrixX& w,
                  bool apply_activation);

/// sigma(A H W) with the normalized self-loop adjacency.
MatrixX gcn_layer(const MatrixX& h, const AdjacencyMatrix& a, const MatrixX& w,
                  bool apply_activation);

/// Column-wise mean over nodes.
RowVectorX global_pool(const MatrixX& h);

// Model ---------------------------------------------------------------------

struct ModelConfig {
  int input_dim = 3;
  std::vector<int> graph_dims{512, 512, 512};
  std::vector<int> dense_dims{500, 200, 25};

  void validate() const;
};

/// Weights are stored (fan_in x fan_out); biases are (1 x fan_out). The last
/// dense layer maps to a single output.
struct ModelParams {
  std::vector<MatrixX> graph_weights;
  std::vector<MatrixX> dense_weights;
  std::vector<MatrixX> dense_biases;

  std::vector<MatrixX*> tensors();
  std::vector<const MatrixX*> tensors() const;
  ModelParams zeros_like() const;
  Eigen::Index parameter_count() const;
  bool matches(const ModelConfig& config) const;
};

/// Glorot-uniform weights, zero biases.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Scaled node features plus compressed adjacency for one graph.
struct PreparedGraph {
  MatrixX features;
  SparseMatrixX adjacency;
};

/// Features and adjacency both from `graph` as given.
PreparedGraph prepare_graph(const Graph& graph, AdjacencyPolicy policy);

/// Scaled features; adjacency from the unscaled mesh coordinates.
PreparedGraph prepare_graph(const Graph& graph, const FeatureScaling& scaling,
                            AdjacencyPolicy policy);

Real model_forward(const PreparedGraph& graph, const ModelParams& params);
Real model_forward(const Graph& graph, const ModelParams& params, AdjacencyPolicy policy);

struct SampleGradient {
  ModelParams grads;
  Real prediction = 0;
  Real loss = 0;
};

/// Squared error of one sample and its gradient for every parameter.
SampleGradient backward(const PreparedGraph& graph, const ModelParams& params, Real y);

// Optimizer -----------------------------------------------------------------

struct AdamConfig {
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
};

struct AdamState {
  ModelParams m;
  ModelParams v;
  long step = 0;
};

AdamState adam_init(const ModelParams& params);
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, Real lr,
               const AdamConfig& config = {});

/// Counts consecutive non-improving observations.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);

  /// Records one value; true once `patience` observations in a row failed to
  /// improve on the best.
  bool observe(Real value);

  bool improved() const { return last_improved_; }
  int best_index() const { return best_index_; }
  Real best_value() const { return best_; }
  int since_best() const { return since_best_; }

 private:
  int patience_;
  int count_ = 0;
  int best_index_ = -1;
  int since_best_ = 0;
  bool last_improved_ = false;
  Real best_ = 0;
};

// Training ------------------------------------------------------------------

struct TrainConfig {
  Real learning_rate = 2e-4;
  int batch_size = 1;
  int max_epochs = 10000;
  int patience = 50;
  std::uint64_t seed = 0;
  AdjacencyPolicy policy = AdjacencyPolicy::WeightedL2;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  Real train_loss = 0;
  Real val_loss = 0;
};

struct TrainResult {
  ModelParams params;  // best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  int stopped_epoch = 0;
  Real best_val_loss = 0;
};

/// Per-sample Adam updates over the shuffled training split, one validation
/// pass per epoch, early stopping on validation MSE.
TrainResult train(const std::vector<PreparedGraph>& graphs, const std::vector<Real>& scaled_labels,
                  const DatasetSplit& split, const ModelConfig& model, const TrainConfig& config);

/// Mean squared error in scaled-label space over `indices`.
Real dataset_mse(const std::vector<PreparedGraph>& graphs, const std::vector<Real>& scaled_labels,
                 const std::vector<int>& indices, const ModelParams& params);

struct TrainedModel {
  ModelConfig model;
  TrainConfig train;
  ModelParams params;
  FeatureScaling features;
  MinMaxScaler labels;
  Performance performance = Performance::Mass;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  int stopped_epoch = 0;
  Real best_val_loss = 0;
};

/// Fits feature and label scaling on the training split, then trains.
TrainedModel fit_model(const std::vector<Graph>& graphs, const std::vector<Real>& labels,
                       Performance performance, const DatasetSplit& split,
                       const ModelConfig& model, const TrainConfig& config);

/// Predictions in physical units.
std::vector<Real> predict(const TrainedModel& model, const std::vector<Graph>& graphs);

/// Metrics in physical units.
Metrics evaluate(const TrainedModel& model, const std::vector<Graph>& graphs,
                 const std::vector<Real>& labels);

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace meshgnn

#endif  // MESHGNN_NN_HPP
