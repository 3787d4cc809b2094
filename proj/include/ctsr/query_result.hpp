#pragma once

#include <string>
#include <vector>

namespace ctsr {

struct QueryItem {
    std::string item_id;
    double score = 0.0;  // higher means more relevant
};

// Ranked retrieval result: scores non-increasing, ties broken by ascending
// item id.
struct QueryResult {
    std::vector<QueryItem> ranked;
    double elapsed_seconds = 0.0;
};

}  // namespace ctsr
