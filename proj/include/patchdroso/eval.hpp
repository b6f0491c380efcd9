#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patchdroso/ensemble.hpp"

namespace droso {

// query index -> correct reference index, plus the frame tolerance
struct GroundTruth {
    std::vector<int> reference_of_query;
    int tolerance = 0;
};

// prediction within +/- tolerance frames of the truth counts as correct
bool is_correct(int predicted, int truth, int tolerance);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;

    bool operator==(const PrPoint&) const = default;
};

struct ConfidenceRecord {
    double confidence = 0.0;
    bool correct = false;
};

// Precision-recall sweep over the distinct confidence values in descending
// order; at threshold t everything with confidence >= t is retrieved. One
// point per distinct threshold, recall nondecreasing.
std::vector<PrPoint> pr_curve(const std::vector<ConfidenceRecord>& records);

// Trapezoidal area over recall after prepending (0, first precision).
double auc(const std::vector<PrPoint>& points);

struct QueryRecord {
    int query_index = 0;
    int predicted = 0;
    int truth = 0;
    double confidence = 0.0;
    bool correct = false;
    double micros = 0.0;  // match_query wall time, preprocessing included
};

struct TimingStats {
    double mean_us = 0.0;
    double median_us = 0.0;
    double min_us = 0.0;
    double max_us = 0.0;
};

struct EvalReport {
    std::vector<QueryRecord> records;
    std::vector<PrPoint> pr_points;
    double auc_value = 0.0;
    double accuracy = 0.0;
    TimingStats timing;
};

TimingStats timing_stats(const std::vector<double>& micros);

// Runs match_query on every query (in parallel when threads > 1; results
// are thread-count independent) and assembles the full report. Wall time
// is measured around match_query only — image loading is the caller's
// problem. Throws std::invalid_argument when the ground truth does not
// cover every query.
EvalReport evaluate_queries(const PatchEnsemble& ensemble,
                            const std::vector<ImageTensor>& queries,
                            const GroundTruth& truth,
                            int threads = 1);

// Per-query wall times for a fixed ensemble, sequential, preloaded images.
TimingStats time_queries(const PatchEnsemble& ensemble,
                         const std::vector<ImageTensor>& queries,
                         std::vector<double>* per_query_micros = nullptr);

// report.csv: every column including wall time
void write_report_csv(const EvalReport& report, const std::string& path);

// predictions.csv: the deterministic columns only (no timing), suitable
// for byte-level comparison across runs
void write_predictions_csv(const EvalReport& report, const std::string& path);

// structured summary: accuracy, auc, pr points, timing stats
void write_summary_json(const EvalReport& report, const std::string& path);

}  // namespace droso
