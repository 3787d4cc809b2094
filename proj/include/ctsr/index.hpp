#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctsr/models.hpp"
#include "ctsr/query_result.hpp"
#include "ctsr/series.hpp"
#include "ctsr/training.hpp"

namespace ctsr {

// Precomputed embeddings for a collection, immutable once built.
struct FeatureIndex {
    std::vector<std::string> item_ids;
    std::vector<std::string> labels;
    std::vector<float> embeddings;  // n x kEmbeddingDim, row-major
    std::string build_info;

    std::size_t size() const { return item_ids.size(); }
    const float* row(std::size_t i) const {
        return embeddings.data() + i * static_cast<std::size_t>(kEmbeddingDim);
    }
};

struct KnnNeighbor {
    std::uint32_t id = 0;
    float dist = 0.0f;
};

// k-NN graph over a FeatureIndex. Neighbor lists are exactly k_graph long,
// self-loop free, sorted ascending by (distance, id). The undirected
// adjacency used by graph search is derived by finalize() and not serialized.
struct KnnGraph {
    int k_graph = 0;
    int iterations_run = 0;
    double sample_rate = 0.0;
    double delta = 0.0;
    std::vector<KnnNeighbor> neighbors;  // n x k_graph

    std::vector<std::uint32_t> adj_offsets;  // derived CSR adjacency
    std::vector<std::uint32_t> adj_ids;

    std::size_t size() const {
        return k_graph == 0 ? 0 : neighbors.size() / static_cast<std::size_t>(k_graph);
    }
    const KnnNeighbor* list(std::size_t v) const {
        return neighbors.data() + v * static_cast<std::size_t>(k_graph);
    }
    void finalize();
};

double embedding_distance(const float* a, const float* b);
double embedding_distance(const Embedding& a, const Embedding& b);

// One embedding call per item; rejects pairwise (rn2d) checkpoints.
FeatureIndex build_exact_index(const LabeledCollection& collection, const CheckpointRecord& ckpt,
                               unsigned threads = 0);

// Builds a FeatureIndex directly from raw embedding rows (n x 64).
FeatureIndex make_feature_index(std::vector<std::string> item_ids, std::vector<std::string> labels,
                                std::vector<float> embeddings);

QueryResult query_exact_embedding(const FeatureIndex& index, const Embedding& q, int k);
QueryResult query_exact(const FeatureIndex& index, const TimeSeries& q, int k,
                        const CheckpointRecord& ckpt);

KnnGraph nn_descent_build(const FeatureIndex& index, int k_graph, double sample_rate, double delta,
                          int max_iters, std::uint64_t seed);

QueryResult nn_descent_query(const KnnGraph& graph, const FeatureIndex& index, const Embedding& q,
                             int k, int n_candidates, std::uint64_t seed);

// Scores every collection item with the pairwise model (n trunk invocations).
QueryResult query_pairwise_scan(const LabeledCollection& collection, const TimeSeries& q, int k,
                                const CheckpointRecord& ckpt, unsigned threads = 0);

// Mean wall-clock seconds per query over queries x repetitions.
double measure_query_time(const std::function<void(const TimeSeries&)>& query_fn,
                          const std::vector<TimeSeries>& queries, int repetitions);

void save_index(const FeatureIndex& index, const KnnGraph* graph, const std::string& path);

struct LoadedIndex {
    FeatureIndex index;
    bool has_graph = false;
    KnnGraph graph;
};
LoadedIndex load_index(const std::string& path);

}  // namespace ctsr
