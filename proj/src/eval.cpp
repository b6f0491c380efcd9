#include "patchdroso/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "patchdroso/errors.hpp"
#include "patchdroso/parallel.hpp"

namespace droso {

namespace {

// shortest representation that round-trips a double
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double elapsed_us(std::chrono::steady_clock::time_point t0,
                  std::chrono::steady_clock::time_point t1) {
    return std::chrono::duration<double, std::micro>(t1 - t0).count();
}

}  // namespace

bool is_correct(int predicted, int truth, int tolerance) {
    return std::abs(static_cast<int64_t>(predicted) - truth) <= tolerance;
}

std::vector<PrPoint> pr_curve(const std::vector<ConfidenceRecord>& records) {
    if (records.empty())
        throw std::invalid_argument("pr_curve requires at least one record");

    std::vector<ConfidenceRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ConfidenceRecord& a, const ConfidenceRecord& b) {
                         return a.confidence > b.confidence;
                     });

    const double total = static_cast<double>(records.size());
    std::vector<PrPoint> points;
    int retrieved = 0;
    int correct_retrieved = 0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        ++retrieved;
        if (sorted[i].correct)
            ++correct_retrieved;
        // emit once per distinct threshold: when the next record has a
        // strictly lower confidence, everything >= this one is in
        if (i + 1 < sorted.size() && sorted[i + 1].confidence == sorted[i].confidence)
            continue;
        points.push_back({static_cast<double>(correct_retrieved) / total,
                          static_cast<double>(correct_retrieved) / retrieved});
    }
    return points;
}

double auc(const std::vector<PrPoint>& points) {
    if (points.empty())
        throw std::invalid_argument("auc requires at least one point");
    double area = 0.0;
    double prev_recall = 0.0;
    double prev_precision = points.front().precision;
    for (const PrPoint& p : points) {
        area += (p.recall - prev_recall) * 0.5 * (p.precision + prev_precision);
        prev_recall = p.recall;
        prev_precision = p.precision;
    }
    return area;
}

TimingStats timing_stats(const std::vector<double>& micros) {
    TimingStats s;
    if (micros.empty())
        return s;
    std::vector<double> sorted = micros;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean_us = sum / static_cast<double>(sorted.size());
    const size_t n = sorted.size();
    s.median_us = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    s.min_us = sorted.front();
    s.max_us = sorted.back();
    return s;
}

EvalReport evaluate_queries(const PatchEnsemble& ensemble,
                            const std::vector<ImageTensor>& queries,
                            const GroundTruth& truth,
                            int threads) {
    if (queries.empty())
        throw std::invalid_argument("no queries to evaluate");
    if (truth.reference_of_query.size() < queries.size())
        throw std::invalid_argument("ground truth does not cover every query");

    EvalReport report;
    report.records.resize(queries.size());
    parallel_for(queries.size(), threads, [&](size_t q) {
        const auto t0 = std::chrono::steady_clock::now();
        const MatchResult m = match_query(ensemble, queries[q]);
        const auto t1 = std::chrono::steady_clock::now();
        QueryRecord& rec = report.records[q];
        rec.query_index = static_cast<int>(q);
        rec.predicted = m.predicted_place;
        rec.truth = truth.reference_of_query[q];
        rec.confidence = m.confidence;
        rec.correct = is_correct(rec.predicted, rec.truth, truth.tolerance);
        rec.micros = elapsed_us(t0, t1);
    });

    std::vector<ConfidenceRecord> conf;
    std::vector<double> micros;
    conf.reserve(report.records.size());
    micros.reserve(report.records.size());
    int n_correct = 0;
    for (const QueryRecord& rec : report.records) {
        conf.push_back({rec.confidence, rec.correct});
        micros.push_back(rec.micros);
        n_correct += rec.correct ? 1 : 0;
    }
    report.pr_points = pr_curve(conf);
    report.auc_value = auc(report.pr_points);
    report.accuracy = static_cast<double>(n_correct) / static_cast<double>(queries.size());
    report.timing = timing_stats(micros);
    return report;
}

TimingStats time_queries(const PatchEnsemble& ensemble,
                         const std::vector<ImageTensor>& queries,
                         std::vector<double>* per_query_micros) {
    std::vector<double> micros;
    micros.reserve(queries.size());
    for (const ImageTensor& q : queries) {
        const auto t0 = std::chrono::steady_clock::now();
        const MatchResult m = match_query(ensemble, q);
        const auto t1 = std::chrono::steady_clock::now();
        (void)m;
        micros.push_back(elapsed_us(t0, t1));
    }
    if (per_query_micros)
        *per_query_micros = micros;
    return timing_stats(micros);
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write CSV: " + path);
    out << "query,prediction,truth,confidence,correct,micros\n";
    for (const QueryRecord& r : report.records) {
        out << r.query_index << ',' << r.predicted << ',' << r.truth << ','
            << fmt_double(r.confidence) << ',' << (r.correct ? 1 : 0) << ','
            << fmt_double(r.micros) << '\n';
    }
}

void write_predictions_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write CSV: " + path);
    out << "query,prediction,truth,confidence,correct\n";
    for (const QueryRecord& r : report.records) {
        out << r.query_index << ',' << r.predicted << ',' << r.truth << ','
            << fmt_double(r.confidence) << ',' << (r.correct ? 1 : 0) << '\n';
    }
}

void write_summary_json(const EvalReport& report, const std::string& path) {
    nlohmann::json j;
    j["n_queries"] = report.records.size();
    j["accuracy"] = report.accuracy;
    j["auc"] = report.auc_value;
    j["timing_us"] = {{"mean", report.timing.mean_us},
                      {"median", report.timing.median_us},
                      {"min", report.timing.min_us},
                      {"max", report.timing.max_us}};
    auto& pts = j["pr_points"] = nlohmann::json::array();
    for (const PrPoint& p : report.pr_points)
        pts.push_back({p.recall, p.precision});

    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write summary: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace droso
