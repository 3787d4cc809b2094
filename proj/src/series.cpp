#include "ctsr/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ctsr/rng.hpp"

namespace ctsr {

const char* split_name(Split s) {
    switch (s) {
        case Split::kTrain: return "train";
        case Split::kValidation: return "validation";
        case Split::kTest: return "test";
    }
    return "?";
}

std::size_t LabeledCollection::count_label(const std::string& label) const {
    std::size_t n = 0;
    for (const auto& it : items)
        if (it.label && *it.label == label) ++n;
    return n;
}

std::vector<std::string> LabeledCollection::distinct_labels() const {
    std::set<std::string> seen;
    for (const auto& it : items)
        if (it.label) seen.insert(*it.label);
    return {seen.begin(), seen.end()};
}

void validate(const TimeSeries& s) {
    if (s.values.size() < 2)
        throw std::invalid_argument("time series must have at least 2 values, got " +
                                    std::to_string(s.values.size()));
    for (double v : s.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("time series '" + s.series_id +
                                        "' contains a non-finite value");
}

void validate(const LabeledCollection& c) {
    for (const auto& it : c.items) {
        validate(it);
        if (!it.label)
            throw std::invalid_argument("collection item '" + it.series_id + "' has no label");
        if (it.length() != c.fixed_length)
            throw std::invalid_argument("collection item '" + it.series_id + "' has length " +
                                        std::to_string(it.length()) + ", expected " +
                                        std::to_string(c.fixed_length));
    }
    if (c.distinct_labels().size() < 2)
        throw std::invalid_argument("collection needs at least 2 distinct labels");
}

namespace {

bool parse_double(const std::string& tok, double* out) {
    if (tok.empty()) return false;
    std::size_t pos = 0;
    try {
        *out = std::stod(tok, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == tok.size();
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

}  // namespace

std::vector<TimeSeries> load_tsv_rows(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<TimeSeries> rows;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        const auto toks = split_tabs(line);
        if (toks.size() < 3)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": need a label and at least 2 values");
        TimeSeries s;
        s.label = toks[0];
        s.series_id = "row-" + std::to_string(rows.size());
        s.values.reserve(toks.size() - 1);
        for (std::size_t i = 1; i < toks.size(); ++i) {
            double v = 0.0;
            if (!parse_double(toks[i], &v) || !std::isfinite(v))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": bad numeric token '" + toks[i] + "'");
            s.values.push_back(v);
        }
        rows.push_back(std::move(s));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no records");
    return rows;
}

LabeledCollection load_tsv(const std::string& path, bool has_header) {
    LabeledCollection c;
    c.items = load_tsv_rows(path, has_header);
    c.fixed_length = c.items.front().length();
    for (std::size_t i = 0; i < c.items.size(); ++i)
        if (c.items[i].length() != c.fixed_length)
            throw std::runtime_error(path + ": row " + std::to_string(i + 1) + " has length " +
                                     std::to_string(c.items[i].length()) + ", expected " +
                                     std::to_string(c.fixed_length));
    return c;
}

void save_tsv(const LabeledCollection& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    char buf[40];
    for (const auto& it : c.items) {
        out << (it.label ? *it.label : "");
        for (double v : it.values) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << '\t' << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

TimeSeries z_normalize(const TimeSeries& s) {
    TimeSeries out = s;
    const std::size_t n = s.values.size();
    if (n == 0) return out;
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : s.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (sd < 1e-8) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }
    for (double& v : out.values) v = (v - mean) / sd;
    return out;
}

TimeSeries resample_to_length(const TimeSeries& s, std::size_t L) {
    if (L < 2) throw std::invalid_argument("resample target length must be >= 2");
    if (L == s.values.size()) return s;
    TimeSeries out;
    out.label = s.label;
    out.series_id = s.series_id;
    out.values.resize(L);
    const std::size_t n = s.values.size();
    const double scale = static_cast<double>(n - 1) / static_cast<double>(L - 1);
    out.values[0] = s.values.front();
    out.values[L - 1] = s.values.back();
    for (std::size_t j = 1; j + 1 < L; ++j) {
        const double pos = static_cast<double>(j) * scale;
        const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
        const double frac = pos - static_cast<double>(i);
        out.values[j] = s.values[i] + frac * (s.values[i + 1] - s.values[i]);
    }
    return out;
}

std::vector<double> waveform(int family, std::size_t L, double phase) {
    std::vector<double> v(L);
    constexpr double kTau = 6.283185307179586476925287;
    for (std::size_t i = 0; i < L; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(L);
        const double arg = kTau * 2.0 * t + phase;  // two cycles across the window
        double y = 0.0;
        switch (family) {
            case 0:  // sine
                y = std::sin(arg);
                break;
            case 1:  // square
                y = std::sin(arg) >= 0.0 ? 1.0 : -1.0;
                break;
            case 2: {  // triangle
                const double u = arg / kTau - std::floor(arg / kTau);
                y = u < 0.5 ? 4.0 * u - 1.0 : 3.0 - 4.0 * u;
                break;
            }
            case 3:  // chirp, 1 -> 3 cycles
                y = std::sin(kTau * (1.0 + 2.0 * t) * t + phase);
                break;
            case 4: {  // ramp (sawtooth)
                const double u = arg / kTau - std::floor(arg / kTau);
                y = 2.0 * u - 1.0;
                break;
            }
            case 5: {  // two bumps, circularly shifted by phase
                const double c = phase / kTau;
                double d1 = std::fabs(t - (c - std::floor(c)));
                d1 = std::min(d1, 1.0 - d1);
                double c2 = c + 0.5;
                double d2 = std::fabs(t - (c2 - std::floor(c2)));
                d2 = std::min(d2, 1.0 - d2);
                y = std::exp(-d1 * d1 / 0.004) + 0.7 * std::exp(-d2 * d2 / 0.002);
                break;
            }
            case 6:  // damped sine
                y = std::exp(-3.0 * t) * std::sin(kTau * 3.0 * t + phase);
                break;
            case 7: {  // oscillation burst, position set by phase
                const double c = phase / kTau;
                double d = std::fabs(t - (c - std::floor(c)));
                d = std::min(d, 1.0 - d);
                y = std::exp(-d * d / 0.01) * std::sin(kTau * 8.0 * t);
                break;
            }
            default:
                throw std::invalid_argument("waveform family out of range");
        }
        v[i] = y;
    }
    return v;
}

LabeledCollection make_synthetic_corpus(std::size_t n_per_class, std::size_t L,
                                        int n_classes, double noise_sigma,
                                        std::uint64_t seed) {
    if (n_classes < 2 || n_classes > kNumWaveformFamilies)
        throw std::invalid_argument("n_classes must be in [2, 8]");
    if (L < 16) throw std::invalid_argument("series length must be >= 16");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (n_per_class == 0) throw std::invalid_argument("n_per_class must be >= 1");

    std::mt19937_64 rng(seed);
    LabeledCollection c;
    c.fixed_length = L;
    c.items.reserve(n_per_class * static_cast<std::size_t>(n_classes));
    constexpr double kTau = 6.283185307179586476925287;
    char idbuf[64];
    for (int cls = 0; cls < n_classes; ++cls) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const double phase = uniform_real(rng, 0.0, kTau);
            TimeSeries s;
            s.values = waveform(cls, L, phase);
            if (noise_sigma > 0.0)
                for (double& v : s.values) v += noise_sigma * normal(rng);
            s.label = std::to_string(cls);
            std::snprintf(idbuf, sizeof(idbuf), "s%llu-c%d-%04zu",
                          static_cast<unsigned long long>(seed), cls, i);
            s.series_id = idbuf;
            c.items.push_back(z_normalize(s));
        }
    }
    return c;
}

}  // namespace ctsr
