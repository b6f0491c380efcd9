#pragma once

#include <optional>
#include <string>

#include "patchdroso/dataset.hpp"
#include "patchdroso/ensemble.hpp"
#include "patchdroso/eval.hpp"
#include "patchdroso/synth.hpp"

namespace droso {

// The command implementations behind the CLI, callable directly from code
// and tests. All of them throw (IoError / FormatError /
// std::invalid_argument) on user errors; the CLI maps that to exit code 1.

struct GenOptions {
    SynthSpec spec;
    int tolerance = 0;
    std::string out_dir;
};

// synth.generate + standard dataset layout on disk
void run_gen(const GenOptions& opt);

struct TrainOptions {
    std::string refs_dir;
    std::string out_path;
    EnsembleConfig config;
    int threads = 1;
};

struct TrainSummary {
    int n_places = 0;
    EnsembleSize size;
};

// loads references in lexicographic order, trains, serializes
TrainSummary run_train(const TrainOptions& opt);

struct EvalOptions {
    std::string ensemble_path;
    std::string queries_dir;
    std::string truth_path;
    std::string out_dir;
    std::optional<int> tolerance_override;  // wins over the file header
    int threads = 1;
};

// writes report.csv, predictions.csv, summary.json, pr_curve.svg
EvalReport run_eval(const EvalOptions& opt);

struct BenchOptions {
    std::string ensemble_path;
    std::string queries_dir;
    std::string out_dir;
    int repeats = 1;
};

struct BenchReport {
    TimingStats timing;
    std::vector<int> predictions;  // one per query, repeat-invariant
};

// writes timing.csv, bench_summary.json, bench_predictions.csv
BenchReport run_bench(const BenchOptions& opt);

}  // namespace droso
