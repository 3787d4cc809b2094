#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ctsr {

// One univariate sequence. Values are unitless after normalization.
struct TimeSeries {
    std::vector<double> values;
    std::optional<std::string> label;
    std::string series_id;

    std::size_t length() const { return values.size(); }
};

enum class Split { kTrain, kValidation, kTest };

const char* split_name(Split s);

// A set of labeled, fixed-length series belonging to one split.
struct LabeledCollection {
    std::vector<TimeSeries> items;
    Split split = Split::kTrain;
    std::size_t fixed_length = 0;

    std::size_t size() const { return items.size(); }
    // number of items sharing `label`
    std::size_t count_label(const std::string& label) const;
    std::vector<std::string> distinct_labels() const;
};

struct RelevanceJudgment {
    std::string query_id;
    std::string item_id;
    bool relevant = false;
};

// Throws std::invalid_argument if any type invariant is violated.
void validate(const TimeSeries& s);
void validate(const LabeledCollection& c);

// Raw TSV rows: `label<TAB>v1<TAB>...<TAB>vN`, N >= 2. Lengths may differ
// between rows. Errors name the offending 1-based line number.
std::vector<TimeSeries> load_tsv_rows(const std::string& path, bool has_header);

// Strict loader: all rows must share one length, which becomes fixed_length.
LabeledCollection load_tsv(const std::string& path, bool has_header = false);

void save_tsv(const LabeledCollection& c, const std::string& path);

// Zero mean, unit population std. Series with population std below 1e-8 map
// to all zeros.
TimeSeries z_normalize(const TimeSeries& s);

// Linear interpolation onto L equally spaced positions over [0, length-1].
// Endpoints are preserved exactly; L == length returns the input verbatim.
TimeSeries resample_to_length(const TimeSeries& s, std::size_t L);

constexpr int kNumWaveformFamilies = 8;

// Noise-free prototype of one waveform family, evaluated on an L-point grid
// over [0, 1) with the given phase shift in [0, 2*pi).
std::vector<double> waveform(int family, std::size_t L, double phase);

// Deterministic labeled corpus: n_classes waveform families, per-item random
// phase plus additive Gaussian noise, every series z-normalized. Item ids are
// "s<seed>-c<class>-<index>".
LabeledCollection make_synthetic_corpus(std::size_t n_per_class, std::size_t L,
                                        int n_classes, double noise_sigma,
                                        std::uint64_t seed);

}  // namespace ctsr
