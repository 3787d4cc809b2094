#include "ctsr/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "ctsr/binio.hpp"
#include "ctsr/eval.hpp"
#include "ctsr/parallel.hpp"

namespace ctsr {

const std::vector<int> kTemplateGrid = {8, 16, 24, 32, 40, 48};

void validate(const TrainConfig& cfg) {
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (cfg.steps_per_epoch < 1) throw std::invalid_argument("steps_per_epoch must be >= 1");
    if (!(cfg.lr > 0) || !(cfg.eps > 0)) throw std::invalid_argument("rates must be positive");
    if (!(cfg.beta1 > 0 && cfg.beta1 < 1) || !(cfg.beta2 > 0 && cfg.beta2 < 1))
        throw std::invalid_argument("betas must be in (0,1)");
    if (cfg.weight_decay < 0) throw std::invalid_argument("weight_decay must be >= 0");
    if (cfg.series_length < 2) throw std::invalid_argument("series_length must be >= 2");
    if (cfg.model_kind == ModelKind::kRn2DwT &&
        std::find(kTemplateGrid.begin(), kTemplateGrid.end(), cfg.n_templates) ==
            kTemplateGrid.end()) {
        std::string grid;
        for (int k : kTemplateGrid) grid += (grid.empty() ? "" : ",") + std::to_string(k);
        throw std::invalid_argument("n_templates must be one of {" + grid + "}, got " +
                                    std::to_string(cfg.n_templates));
    }
}

std::vector<Triplet> sample_triplet_batch(const LabeledCollection& collection, std::size_t m,
                                          std::mt19937_64& rng) {
    // index items by label
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < collection.items.size(); ++i) {
        const auto& it = collection.items[i];
        if (!it.label) throw std::invalid_argument("triplet sampling needs labeled items");
        by_label[*it.label].push_back(i);
    }
    if (by_label.size() < 2)
        throw std::invalid_argument("triplet sampling needs at least 2 distinct labels");
    std::vector<std::size_t> anchor_pool;  // items whose class has >= 2 members
    for (const auto& [label, idxs] : by_label)
        if (idxs.size() >= 2) anchor_pool.insert(anchor_pool.end(), idxs.begin(), idxs.end());
    if (anchor_pool.empty())
        throw std::invalid_argument("triplet sampling impossible: every class is a singleton");

    std::vector<Triplet> batch;
    batch.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t a = anchor_pool[uniform_index(rng, anchor_pool.size())];
        const auto& a_item = collection.items[a];
        const auto& classmates = by_label[*a_item.label];
        std::size_t p = a;
        while (p == a) p = classmates[uniform_index(rng, classmates.size())];
        std::size_t ng = a;
        while (collection.items[ng].label == a_item.label)
            ng = uniform_index(rng, collection.items.size());
        batch.push_back(Triplet{a_item, collection.items[p], collection.items[ng]});
    }
    return batch;
}

namespace {

// -log(sigmoid(d)) = softplus(-d), computed without overflow
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

double bpr_loss(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg) {
    if (scores_pos.size() != scores_neg.size() || scores_pos.empty())
        throw std::invalid_argument("bpr_loss: score lists must have equal nonzero length");
    double loss = 0.0;
    for (std::size_t i = 0; i < scores_pos.size(); ++i)
        loss += softplus(-(scores_pos[i] - scores_neg[i]));
    return loss;
}

void bpr_loss_backward(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg,
                       std::vector<double>* grad_pos, std::vector<double>* grad_neg) {
    if (scores_pos.size() != scores_neg.size())
        throw std::invalid_argument("bpr_loss_backward: score lists must have equal length");
    grad_pos->resize(scores_pos.size());
    grad_neg->resize(scores_pos.size());
    for (std::size_t i = 0; i < scores_pos.size(); ++i) {
        const double s = sigmoid(scores_pos[i] - scores_neg[i]);
        (*grad_pos)[i] = s - 1.0;
        (*grad_neg)[i] = 1.0 - s;
    }
}

nn::ParamStore<float> init_params_for(const TrainConfig& cfg, const LabeledCollection& train) {
    std::mt19937_64 rng(cfg.seed);
    switch (cfg.model_kind) {
        case ModelKind::kRn2D: return init_rn2d_params<float>(rng);
        case ModelKind::kRn1D: return init_rn1d_params<float>(rng);
        case ModelKind::kRn2DwT: break;
    }
    auto params = init_rn2dwt_params<float>(cfg.n_templates, cfg.series_length, rng);
    // warm-start templates from the training split, sampled without replacement
    const std::size_t n = train.items.size();
    if (n >= static_cast<std::size_t>(cfg.n_templates)) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        auto& templates = params.at("templates");
        for (int k = 0; k < cfg.n_templates; ++k) {
            const std::size_t pick =
                static_cast<std::size_t>(k) + uniform_index(rng, n - static_cast<std::size_t>(k));
            std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
            const auto& src = train.items[idx[static_cast<std::size_t>(k)]].values;
            if (src.size() != static_cast<std::size_t>(cfg.series_length))
                throw std::invalid_argument("training items must have the configured length");
            for (int j = 0; j < cfg.series_length; ++j)
                templates.data[static_cast<std::size_t>(k * cfg.series_length + j)] =
                    static_cast<float>(src[static_cast<std::size_t>(j)]);
        }
    }
    return params;
}

namespace {

std::vector<Embedding> embed_all(const nn::ParamStore<float>& params, ModelKind kind,
                                 const LabeledCollection& c, unsigned threads) {
    std::vector<Embedding> out(c.items.size());
    parallel_for(c.items.size(), threads,
                 [&](std::size_t i) { out[i] = embed_series(c.items[i], params, kind); });
    return out;
}

}  // namespace

double validation_ndcg10(const nn::ParamStore<float>& params, ModelKind kind,
                         const LabeledCollection& train, const LabeledCollection& val,
                         unsigned threads) {
    constexpr int kK = 10;
    const std::size_t n = train.items.size();
    std::vector<Embedding> db;
    if (is_embedding_model(kind)) db = embed_all(params, kind, train, threads);

    std::vector<double> per_query(val.items.size());
    parallel_for(val.items.size(), threads, [&](std::size_t qi) {
        const auto& q = val.items[qi];
        std::vector<double> score(n);
        if (is_embedding_model(kind)) {
            const Embedding qe = embed_series(q, params, kind);
            for (std::size_t i = 0; i < n; ++i) score[i] = relevance_from_embeddings(qe, db[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) score[i] = score_rn2d(train.items[i], q, params);
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (score[a] != score[b]) return score[a] > score[b];
            return train.items[a].series_id < train.items[b].series_id;
        });
        std::vector<bool> rel;
        int total_relevant = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (train.items[i].series_id == q.series_id) continue;
            if (train.items[i].label == q.label) ++total_relevant;
        }
        rel.reserve(static_cast<std::size_t>(kK));
        for (std::size_t r = 0; r < n && rel.size() < static_cast<std::size_t>(kK); ++r) {
            const auto& item = train.items[order[r]];
            if (item.series_id == q.series_id) continue;
            rel.push_back(item.label == q.label);
        }
        per_query[qi] = ndcg_at_k(rel, kK, total_relevant);
    });
    double mean = 0.0;
    for (double v : per_query) mean += v;
    return per_query.empty() ? 0.0 : mean / static_cast<double>(per_query.size());
}

namespace {

// Per-triplet workspace: activations plus a private gradient sink so batch
// reduction happens in triplet order regardless of thread scheduling.
struct TripletSlot {
    nn::ParamStore<float> grads;
    Rn2DwTActs<float> wt_anchor, wt_pos, wt_neg;
    Rn1DActs<float> r1_anchor, r1_pos, r1_neg;
    Rn2DActs<float> r2_pos, r2_neg;
    nn::Tensor<float> e_anchor, e_pos, e_neg;
    double score_pos = 0.0, score_neg = 0.0;
};

}  // namespace

CheckpointRecord train(const LabeledCollection& train_collection,
                       const LabeledCollection& val_collection, const TrainConfig& cfg,
                       std::vector<EpochStats>* history) {
    validate(cfg);
    validate(train_collection);
    validate(val_collection);
    for (const auto& it : train_collection.items)
        if (it.length() != static_cast<std::size_t>(cfg.series_length))
            throw std::invalid_argument("training series length != config series_length");

    const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
    nn::ParamStore<float> params = init_params_for(cfg, train_collection);
    std::mt19937_64 sample_rng(cfg.seed + 0x9e3779b97f4a7c15ull);

    const std::size_t m = static_cast<std::size_t>(cfg.batch_size);
    std::vector<TripletSlot> slots(m);
    for (auto& s : slots) s.grads = params.clone_values();

    const nn::AdamWConfig adamw{cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay};
    const bool embedding_model = is_embedding_model(cfg.model_kind);

    CheckpointRecord best;
    best.model_kind = cfg.model_kind;
    best.config = cfg;
    best.params = params.clone_values();
    best.best_epoch = -1;
    best.best_val_ndcg10 = -1.0;

    if (cfg.epochs == 0) {
        best.best_val_ndcg10 = validation_ndcg10(params, cfg.model_kind, train_collection,
                                                 val_collection, threads);
        if (history) history->push_back({0, 0.0, best.best_val_ndcg10});
        return best;
    }

    std::int64_t global_step = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (int step = 0; step < cfg.steps_per_epoch; ++step) {
            ++global_step;
            const auto batch = sample_triplet_batch(train_collection, m, sample_rng);

            parallel_for(m, threads, [&](std::size_t i) {
                auto& slot = slots[i];
                slot.grads.zero_grads();
                const Triplet& t = batch[i];
                if (embedding_model) {
                    if (cfg.model_kind == ModelKind::kRn2DwT) {
                        slot.e_anchor = rn2dwt_forward(params, t.anchor.values, &slot.wt_anchor);
                        slot.e_pos = rn2dwt_forward(params, t.positive.values, &slot.wt_pos);
                        slot.e_neg = rn2dwt_forward(params, t.negative.values, &slot.wt_neg);
                    } else {
                        slot.e_anchor = rn1d_forward(params, t.anchor.values, &slot.r1_anchor);
                        slot.e_pos = rn1d_forward(params, t.positive.values, &slot.r1_pos);
                        slot.e_neg = rn1d_forward(params, t.negative.values, &slot.r1_neg);
                    }
                    slot.score_pos = static_cast<double>(neg_l2_score(slot.e_anchor, slot.e_pos));
                    slot.score_neg = static_cast<double>(neg_l2_score(slot.e_anchor, slot.e_neg));
                } else {
                    slot.score_pos = static_cast<double>(
                        rn2d_forward(params, t.anchor.values, t.positive.values, &slot.r2_pos));
                    slot.score_neg = static_cast<double>(
                        rn2d_forward(params, t.anchor.values, t.negative.values, &slot.r2_neg));
                }
            });

            std::vector<double> pos(m), neg(m);
            for (std::size_t i = 0; i < m; ++i) {
                pos[i] = slots[i].score_pos;
                neg[i] = slots[i].score_neg;
            }
            const double loss = bpr_loss(pos, neg);
            if (!std::isfinite(loss))
                throw std::runtime_error("non-finite training loss at step " +
                                         std::to_string(global_step));
            epoch_loss += loss / static_cast<double>(m);
            std::vector<double> gpos, gneg;
            bpr_loss_backward(pos, neg, &gpos, &gneg);

            parallel_for(m, threads, [&](std::size_t i) {
                auto& slot = slots[i];
                const Triplet& t = batch[i];
                if (embedding_model) {
                    nn::Tensor<float> ga(slot.e_anchor.shape), gp(slot.e_pos.shape),
                        gn(slot.e_neg.shape);
                    neg_l2_score_backward(slot.e_anchor, slot.e_pos,
                                          static_cast<float>(gpos[i]), &ga, &gp);
                    neg_l2_score_backward(slot.e_anchor, slot.e_neg,
                                          static_cast<float>(gneg[i]), &ga, &gn);
                    if (cfg.model_kind == ModelKind::kRn2DwT) {
                        rn2dwt_backward(params, slot.grads, t.anchor.values, slot.wt_anchor, ga);
                        rn2dwt_backward(params, slot.grads, t.positive.values, slot.wt_pos, gp);
                        rn2dwt_backward(params, slot.grads, t.negative.values, slot.wt_neg, gn);
                    } else {
                        rn1d_backward(params, slot.grads, slot.r1_anchor, ga);
                        rn1d_backward(params, slot.grads, slot.r1_pos, gp);
                        rn1d_backward(params, slot.grads, slot.r1_neg, gn);
                    }
                } else {
                    rn2d_backward(params, slot.grads, slot.r2_pos, static_cast<float>(gpos[i]));
                    rn2d_backward(params, slot.grads, slot.r2_neg, static_cast<float>(gneg[i]));
                }
            });

            params.zero_grads();
            for (std::size_t i = 0; i < m; ++i) params.accumulate_grads_from(slots[i].grads);
            adamw_step(params, adamw);
        }

        const double val_ndcg =
            validation_ndcg10(params, cfg.model_kind, train_collection, val_collection, threads);
        const double mean_loss = epoch_loss / static_cast<double>(cfg.steps_per_epoch);
        if (history) history->push_back({epoch, mean_loss, val_ndcg});
        if (val_ndcg > best.best_val_ndcg10) {
            best.best_val_ndcg10 = val_ndcg;
            best.best_epoch = epoch;
            best.params = params.clone_values();
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// checkpoint container
// ---------------------------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[4] = {'C', 'T', 'S', 'R'};
constexpr std::uint32_t kFormatVersion = 1;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string config_text(const CheckpointRecord& rec) {
    const TrainConfig& c = rec.config;
    std::ostringstream os;
    os << "batch_size=" << c.batch_size << '\n'
       << "epochs=" << c.epochs << '\n'
       << "steps_per_epoch=" << c.steps_per_epoch << '\n'
       << "lr=" << format_double(c.lr) << '\n'
       << "beta1=" << format_double(c.beta1) << '\n'
       << "beta2=" << format_double(c.beta2) << '\n'
       << "eps=" << format_double(c.eps) << '\n'
       << "weight_decay=" << format_double(c.weight_decay) << '\n'
       << "n_templates=" << c.n_templates << '\n'
       << "series_length=" << c.series_length << '\n'
       << "seed=" << c.seed << '\n'
       << "threads=" << c.threads << '\n'
       << "best_val_ndcg10=" << format_double(rec.best_val_ndcg10) << '\n'
       << "best_epoch=" << rec.best_epoch << '\n';
    return os.str();
}

void parse_config_text(const std::string& text, CheckpointRecord* rec) {
    std::istringstream is(text);
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    TrainConfig& c = rec->config;
    auto geti = [&](const char* k, auto def) {
        auto it = kv.find(k);
        return it == kv.end() ? def : static_cast<decltype(def)>(std::stoll(it->second));
    };
    auto getd = [&](const char* k, double def) {
        auto it = kv.find(k);
        return it == kv.end() ? def : std::stod(it->second);
    };
    c.batch_size = geti("batch_size", c.batch_size);
    c.epochs = geti("epochs", c.epochs);
    c.steps_per_epoch = geti("steps_per_epoch", c.steps_per_epoch);
    c.lr = getd("lr", c.lr);
    c.beta1 = getd("beta1", c.beta1);
    c.beta2 = getd("beta2", c.beta2);
    c.eps = getd("eps", c.eps);
    c.weight_decay = getd("weight_decay", c.weight_decay);
    c.n_templates = geti("n_templates", c.n_templates);
    c.series_length = geti("series_length", c.series_length);
    c.seed = geti("seed", c.seed);
    c.threads = geti("threads", c.threads);
    rec->best_val_ndcg10 = getd("best_val_ndcg10", 0.0);
    rec->best_epoch = geti("best_epoch", -1);
}

}  // namespace

void save_checkpoint(const CheckpointRecord& rec, const std::string& path) {
    binio::Writer w(path);
    w.bytes(kCheckpointMagic, 4);
    w.u32(kFormatVersion);
    w.str(model_kind_name(rec.model_kind));
    w.str(config_text(rec));
    w.u32(static_cast<std::uint32_t>(rec.params.size()));
    for (const auto& e : rec.params.entries()) {
        w.str(e.name);
        w.u32(static_cast<std::uint32_t>(e.value.shape.size()));
        for (auto d : e.value.shape) w.u64(static_cast<std::uint64_t>(d));
        w.f32_array(e.value.data.data(), e.value.data.size());
    }
    w.close();
}

CheckpointRecord load_checkpoint(const std::string& path) {
    binio::Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw std::runtime_error("'" + path + "' is not a checkpoint (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    CheckpointRecord rec;
    rec.format_version = version;
    rec.model_kind = model_kind_from_name(r.str(64));
    parse_config_text(r.str(1u << 16), &rec);
    rec.config.model_kind = rec.model_kind;
    const std::uint32_t count = r.u32();
    if (count > 4096) throw std::runtime_error("implausible tensor count in '" + path + "'");
    for (std::uint32_t t = 0; t < count; ++t) {
        const std::string name = r.str(4096);
        const std::uint32_t rank = r.u32();
        if (rank == 0 || rank > 4)
            throw std::runtime_error("bad tensor rank for '" + name + "' in '" + path + "'");
        std::vector<std::int64_t> shape(rank);
        std::int64_t numel = 1;
        for (auto& d : shape) {
            d = static_cast<std::int64_t>(r.u64());
            if (d <= 0 || d > (1 << 24))
                throw std::runtime_error("bad tensor dim for '" + name + "' in '" + path + "'");
            numel *= d;
            if (numel > (1ll << 30))
                throw std::runtime_error("implausible tensor size in '" + path + "'");
        }
        nn::Tensor<float> tensor(shape);
        r.f32_array(tensor.data.data(), tensor.data.size());
        rec.params.add(name, std::move(tensor));
    }
    if (!r.at_eof()) throw std::runtime_error("trailing bytes in checkpoint '" + path + "'");
    return rec;
}

}  // namespace ctsr
