#include "patchdroso/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "patchdroso/errors.hpp"
#include "patchdroso/serialize.hpp"
#include "patchdroso/svg.hpp"

namespace fs = std::filesystem;

namespace droso {

void run_gen(const GenOptions& opt) {
    if (opt.out_dir.empty())
        throw std::invalid_argument("gen: output directory required");
    if (opt.tolerance < 0)
        throw std::invalid_argument("gen: tolerance must be >= 0");
    const SynthDataset data = generate(opt.spec);
    write_dataset(data, opt.out_dir, opt.tolerance);
}

TrainSummary run_train(const TrainOptions& opt) {
    const std::vector<ImageTensor> refs = load_image_dir(opt.refs_dir);
    if (refs.size() < 2)
        throw std::invalid_argument("train: need at least 2 reference images in " +
                                    opt.refs_dir);
    const PatchEnsemble ensemble = build_and_train(opt.config, refs, opt.threads);
    save_ensemble(ensemble, opt.out_path);

    TrainSummary summary;
    summary.n_places = ensemble.n_places;
    summary.size = ensemble_size(opt.config.grid, opt.config.units_per_patch);
    return summary;
}

EvalReport run_eval(const EvalOptions& opt) {
    const PatchEnsemble ensemble = load_ensemble(opt.ensemble_path);
    const std::vector<ImageTensor> queries = load_image_dir(opt.queries_dir);
    if (queries.empty())
        throw std::invalid_argument("eval: no query images in " + opt.queries_dir);

    GroundTruth truth = load_ground_truth(opt.truth_path);
    if (opt.tolerance_override)
        truth.tolerance = *opt.tolerance_override;
    if (truth.reference_of_query.size() != queries.size())
        throw std::invalid_argument("eval: ground truth has " +
                                    std::to_string(truth.reference_of_query.size()) +
                                    " rows but there are " +
                                    std::to_string(queries.size()) + " queries");
    const int max_ref =
        *std::max_element(truth.reference_of_query.begin(), truth.reference_of_query.end());
    if (max_ref >= ensemble.n_places)
        throw std::invalid_argument(
            "eval: ground truth references place " + std::to_string(max_ref) +
            " but the ensemble knows only " + std::to_string(ensemble.n_places));

    const EvalReport report = evaluate_queries(ensemble, queries, truth, opt.threads);

    fs::create_directories(opt.out_dir);
    write_report_csv(report, (fs::path(opt.out_dir) / "report.csv").string());
    write_predictions_csv(report, (fs::path(opt.out_dir) / "predictions.csv").string());
    write_summary_json(report, (fs::path(opt.out_dir) / "summary.json").string());
    write_pr_curve_svg(report.pr_points, report.auc_value, "Precision-Recall",
                       (fs::path(opt.out_dir) / "pr_curve.svg").string());
    return report;
}

BenchReport run_bench(const BenchOptions& opt) {
    if (opt.repeats < 1)
        throw std::invalid_argument("bench: repeats must be >= 1");
    const PatchEnsemble ensemble = load_ensemble(opt.ensemble_path);
    const std::vector<ImageTensor> queries = load_image_dir(opt.queries_dir);
    if (queries.empty())
        throw std::invalid_argument("bench: no query images in " + opt.queries_dir);

    BenchReport report;
    std::vector<double> pooled;
    pooled.reserve(queries.size() * static_cast<size_t>(opt.repeats));
    for (int rep = 0; rep < opt.repeats; ++rep) {
        std::vector<double> micros;
        time_queries(ensemble, queries, &micros);
        pooled.insert(pooled.end(), micros.begin(), micros.end());
    }
    report.timing = timing_stats(pooled);
    report.predictions.reserve(queries.size());
    for (const ImageTensor& q : queries)
        report.predictions.push_back(match_query(ensemble, q).predicted_place);

    fs::create_directories(opt.out_dir);
    {
        std::ofstream out(fs::path(opt.out_dir) / "timing.csv");
        if (!out)
            throw IoError("cannot write timing.csv under " + opt.out_dir);
        out << "sample,micros\n";
        for (size_t i = 0; i < pooled.size(); ++i) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", pooled[i]);
            out << i << ',' << buf << '\n';
        }
    }
    {
        nlohmann::json j;
        j["n_queries"] = queries.size();
        j["repeats"] = opt.repeats;
        j["timing_us"] = {{"mean", report.timing.mean_us},
                          {"median", report.timing.median_us},
                          {"min", report.timing.min_us},
                          {"max", report.timing.max_us}};
        std::ofstream out(fs::path(opt.out_dir) / "bench_summary.json");
        if (!out)
            throw IoError("cannot write bench_summary.json under " + opt.out_dir);
        out << j.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(opt.out_dir) / "bench_predictions.csv");
        if (!out)
            throw IoError("cannot write bench_predictions.csv under " + opt.out_dir);
        out << "query,prediction\n";
        for (size_t q = 0; q < report.predictions.size(); ++q)
            out << q << ',' << report.predictions[q] << '\n';
    }
    return report;
}

}  // namespace droso
