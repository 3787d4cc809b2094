#include "ctsr/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "ctsr/parallel.hpp"

#include "json.hpp"

namespace ctsr {

namespace {
void check_k(int k) {
    if (k < 1) throw std::invalid_argument("metric cutoff k must be >= 1");
}
}  // namespace

double precision_at_k(const std::vector<bool>& relevance, int k) {
    check_k(k);
    int hits = 0;
    for (int i = 0; i < k && i < static_cast<int>(relevance.size()); ++i)
        if (relevance[static_cast<std::size_t>(i)]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision_at_k(const std::vector<bool>& relevance, int k) {
    check_k(k);
    int hits = 0;
    double sum = 0.0;
    for (int i = 0; i < k && i < static_cast<int>(relevance.size()); ++i) {
        if (relevance[static_cast<std::size_t>(i)]) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    if (hits == 0) return 0.0;
    return sum / static_cast<double>(hits);
}

double ndcg_at_k(const std::vector<bool>& relevance, int k, int total_relevant) {
    check_k(k);
    if (total_relevant < 0) throw std::invalid_argument("total_relevant must be >= 0");
    if (total_relevant == 0) return 0.0;
    double dcg = 0.0;
    for (int i = 0; i < k && i < static_cast<int>(relevance.size()); ++i)
        if (relevance[static_cast<std::size_t>(i)])
            dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    double idcg = 0.0;
    const int ideal = std::min(k, total_relevant);
    for (int i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

// ---------------------------------------------------------------------------
// Welch's t-test
// ---------------------------------------------------------------------------

namespace {

// continued fraction for the regularized incomplete beta (Lentz's method)
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("degrees of freedom must be positive");
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult two_sample_t_test(const std::vector<double>& sample_a,
                              const std::vector<double>& sample_b) {
    const std::size_t na = sample_a.size(), nb = sample_b.size();
    if (na < 2 || nb < 2) throw std::invalid_argument("t-test needs at least 2 samples per group");
    auto mean_var = [](const std::vector<double>& s) {
        double mean = 0.0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        double var = 0.0;
        for (double v : s) var += (v - mean) * (v - mean);
        var /= static_cast<double>(s.size() - 1);  // sample variance
        return std::pair<double, double>(mean, var);
    };
    const auto [ma, va] = mean_var(sample_a);
    const auto [mb, vb] = mean_var(sample_b);
    if (va == 0.0 && vb == 0.0) {
        if (ma == mb) return TTestResult{0.0, static_cast<double>(na + nb - 2), 1.0, false};
        throw std::invalid_argument("t-test degenerate: both samples have zero variance");
    }
    const double sa = va / static_cast<double>(na);
    const double sb = vb / static_cast<double>(nb);
    const double se = std::sqrt(sa + sb);
    const double t = (ma - mb) / se;
    const double df = (sa + sb) * (sa + sb) /
                      (sa * sa / static_cast<double>(na - 1) + sb * sb / static_cast<double>(nb - 1));
    const double p = student_t_two_sided_p(t, df);
    return TTestResult{t, df, p, p < 0.05};
}

// ---------------------------------------------------------------------------
// batch evaluation
// ---------------------------------------------------------------------------

MetricsReport evaluate_queries(const std::vector<TimeSeries>& queries,
                               const LabeledCollection& database, const QueryFn& query_fn,
                               const std::vector<int>& k_grid, unsigned threads) {
    if (queries.empty()) throw std::invalid_argument("evaluate_queries: empty query set");
    if (k_grid.empty()) throw std::invalid_argument("evaluate_queries: empty k grid");
    for (int k : k_grid) check_k(k);
    for (const auto& q : queries)
        if (!q.label) throw std::invalid_argument("evaluate_queries: query '" + q.series_id +
                                                  "' has no label");

    const int max_k = *std::max_element(k_grid.begin(), k_grid.end());
    std::unordered_map<std::string, const TimeSeries*> by_id;
    by_id.reserve(database.items.size());
    std::unordered_map<std::string, int> label_counts;
    for (const auto& item : database.items) {
        by_id[item.series_id] = &item;
        ++label_counts[*item.label];
    }

    MetricsReport report;
    report.k_grid = k_grid;
    report.n_queries = queries.size();
    report.per_query.resize(queries.size());
    std::vector<double> elapsed(queries.size(), 0.0);

    parallel_for(queries.size(), threads, [&](std::size_t qi) {
        const TimeSeries& q = queries[qi];
        // +1 so the ranking survives removing the query itself
        const auto t0 = std::chrono::steady_clock::now();
        const QueryResult res = query_fn(q, max_k + 1);
        elapsed[qi] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        int total_relevant = 0;
        {
            auto it = label_counts.find(*q.label);
            if (it != label_counts.end()) total_relevant = it->second;
            auto self = by_id.find(q.series_id);
            if (self != by_id.end() && *self->second->label == *q.label) --total_relevant;
        }
        std::vector<bool> rel;
        rel.reserve(static_cast<std::size_t>(max_k));
        for (const auto& entry : res.ranked) {
            if (static_cast<int>(rel.size()) >= max_k) break;
            if (entry.item_id == q.series_id) continue;
            auto it = by_id.find(entry.item_id);
            if (it == by_id.end())
                throw std::runtime_error("query returned unknown item id '" + entry.item_id + "'");
            rel.push_back(*it->second->label == *q.label);
        }
        PerQueryMetrics& pm = report.per_query[qi];
        pm.query_id = q.series_id;
        for (int k : k_grid) {
            pm.prec[k] = precision_at_k(rel, k);
            pm.ap[k] = average_precision_at_k(rel, k);
            pm.ndcg[k] = ndcg_at_k(rel, k, total_relevant);
        }
    });

    for (int k : k_grid) {
        double p = 0, a = 0, n = 0;
        for (const auto& pm : report.per_query) {
            p += pm.prec.at(k);
            a += pm.ap.at(k);
            n += pm.ndcg.at(k);
        }
        const double nq = static_cast<double>(queries.size());
        report.mean_prec[k] = p / nq;
        report.mean_ap[k] = a / nq;
        report.mean_ndcg[k] = n / nq;
    }
    double te = 0.0;
    for (double e : elapsed) te += e;
    report.mean_query_time_s = te / static_cast<double>(queries.size());
    return report;
}

std::string metrics_report_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["k_grid"] = report.k_grid;
    j["n_queries"] = report.n_queries;
    j["mean_query_time_s"] = report.mean_query_time_s;
    auto map_to_json = [](const std::map<int, double>& m) {
        nlohmann::json o = nlohmann::json::object();
        for (const auto& [k, v] : m) o[std::to_string(k)] = v;
        return o;
    };
    j["means"] = {{"prec", map_to_json(report.mean_prec)},
                  {"ap", map_to_json(report.mean_ap)},
                  {"ndcg", map_to_json(report.mean_ndcg)}};
    nlohmann::json per = nlohmann::json::array();
    for (const auto& pm : report.per_query) {
        nlohmann::json o;
        o["query_id"] = pm.query_id;
        o["prec"] = map_to_json(pm.prec);
        o["ap"] = map_to_json(pm.ap);
        o["ndcg"] = map_to_json(pm.ndcg);
        per.push_back(std::move(o));
    }
    j["per_query"] = std::move(per);
    return j.dump(2);
}

}  // namespace ctsr
