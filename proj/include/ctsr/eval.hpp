#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ctsr/query_result.hpp"
#include "ctsr/series.hpp"

namespace ctsr {

// Ranked relevance booleans: entries beyond the list are treated as
// non-relevant, so rankings shorter than k are implicitly padded.
double precision_at_k(const std::vector<bool>& relevance, int k);

// Mean of precision-at-i over the relevant ranks i <= k, divided by the
// number of relevant items retrieved within the top k; 0 when none are.
double average_precision_at_k(const std::vector<bool>& relevance, int k);

// Binary-gain NDCG with IDCG over min(k, total_relevant) ideal hits; 0 when
// total_relevant is 0.
double ndcg_at_k(const std::vector<bool>& relevance, int k, int total_relevant);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    bool significant_at_0_05 = false;
};

// Welch's unequal-variance t statistic with Welch-Satterthwaite degrees of
// freedom; two-sided p-value.
TTestResult two_sample_t_test(const std::vector<double>& sample_a,
                              const std::vector<double>& sample_b);

// Survival function helpers exposed for the numerical-oracle tests.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, double df);

struct PerQueryMetrics {
    std::string query_id;
    std::map<int, double> prec;
    std::map<int, double> ndcg;
    std::map<int, double> ap;
};

struct MetricsReport {
    std::vector<int> k_grid;
    std::vector<PerQueryMetrics> per_query;
    std::map<int, double> mean_prec, mean_ap, mean_ndcg;
    std::size_t n_queries = 0;
    double mean_query_time_s = 0.0;
};

using QueryFn = std::function<QueryResult(const TimeSeries&, int k)>;

// Runs query_fn for every query, derives per-query metrics for each k in the
// grid (relevant = same label, the query's own id excluded from the ranking),
// and aggregates arithmetic means.
MetricsReport evaluate_queries(const std::vector<TimeSeries>& queries,
                               const LabeledCollection& database, const QueryFn& query_fn,
                               const std::vector<int>& k_grid, unsigned threads = 1);

std::string metrics_report_to_json(const MetricsReport& report);

}  // namespace ctsr
