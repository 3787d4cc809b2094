#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctsr/models.hpp"
#include "ctsr/params.hpp"
#include "ctsr/series.hpp"

namespace ctsr {

struct Triplet {
    TimeSeries anchor;
    TimeSeries positive;  // same label as anchor, different series
    TimeSeries negative;  // different label
};

struct TrainConfig {
    ModelKind model_kind = ModelKind::kRn2DwT;
    int batch_size = 32;
    int epochs = 5;
    int steps_per_epoch = 100;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-2;
    int n_templates = 32;
    int series_length = 64;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
};

// The template-count grid supported by the sweep tooling.
extern const std::vector<int> kTemplateGrid;

void validate(const TrainConfig& cfg);

struct CheckpointRecord {
    std::uint32_t format_version = 1;
    ModelKind model_kind = ModelKind::kRn2DwT;
    TrainConfig config;
    nn::ParamStore<float> params;
    double best_val_ndcg10 = 0.0;
    int best_epoch = -1;  // -1 means the initialization checkpoint
};

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    double val_ndcg10 = 0.0;
};

// Anchors are drawn uniformly from items whose class has at least two
// members; positives uniformly from the anchor's classmates, negatives
// uniformly from the other classes.
std::vector<Triplet> sample_triplet_batch(const LabeledCollection& collection, std::size_t m,
                                          std::mt19937_64& rng);

// sum_i -log(sigmoid(pos_i - neg_i)), evaluated through softplus for
// numerical stability.
double bpr_loss(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg);

// gradients w.r.t. the two score lists: (sigma(d)-1, 1-sigma(d))
void bpr_loss_backward(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg,
                       std::vector<double>* grad_pos, std::vector<double>* grad_neg);

// Fresh parameters for cfg; RN2Dw/T templates are warm-started from series
// sampled without replacement from the collection.
nn::ParamStore<float> init_params_for(const TrainConfig& cfg, const LabeledCollection& train);

// Mean validation NDCG@10 with the training collection as the database.
double validation_ndcg10(const nn::ParamStore<float>& params, ModelKind kind,
                         const LabeledCollection& train, const LabeledCollection& val,
                         unsigned threads);

CheckpointRecord train(const LabeledCollection& train_collection,
                       const LabeledCollection& val_collection, const TrainConfig& cfg,
                       std::vector<EpochStats>* history = nullptr);

void save_checkpoint(const CheckpointRecord& rec, const std::string& path);
CheckpointRecord load_checkpoint(const std::string& path);

}  // namespace ctsr
