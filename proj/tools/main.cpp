#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "patchdroso/pipeline.hpp"

namespace {

droso::GridShape parse_grid(const std::string& text) {
    const size_t sep = text.find_first_of("xX");
    if (sep == std::string::npos || sep == 0 || sep + 1 >= text.size())
        throw CLI::ValidationError("--grid", "expected RxC, e.g. 3x1");
    try {
        droso::GridShape shape{std::stoi(text.substr(0, sep)),
                               std::stoi(text.substr(sep + 1))};
        droso::validate_grid(shape);
        return shape;
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--grid", e.what());
    }
}

droso::CorruptMode parse_corrupt_mode(const std::string& text) {
    if (text == "blackout") return droso::CorruptMode::blackout;
    if (text == "noise") return droso::CorruptMode::noise_burst;
    if (text == "brightness") return droso::CorruptMode::brightness_shift;
    throw CLI::ValidationError("--corrupt-mode", "expected blackout|noise|brightness");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patch-trained voting place recognition"};
    app.require_subcommand(1);
    app.set_config("--config", "", "config file; command-line flags win");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic reference/query dataset");
    std::string gen_out;
    int gen_places = 50, gen_rows = 96, gen_cols = 192, gen_shift = 0;
    int gen_tolerance = 0, gen_corrupt_cell = -1;
    uint64_t gen_seed = 0;
    double gen_noise = 0.0;
    std::string gen_grid = "3x1", gen_mode = "blackout";
    gen->add_option("--out", gen_out, "output dataset directory")->required();
    gen->add_option("--places", gen_places, "number of places");
    gen->add_option("--seed", gen_seed, "base seed");
    gen->add_option("--rows", gen_rows, "image rows");
    gen->add_option("--cols", gen_cols, "image cols");
    gen->add_option("--noise", gen_noise, "query gaussian noise sigma");
    gen->add_option("--shift", gen_shift, "query lateral pixel shift");
    gen->add_option("--corrupt-cell", gen_corrupt_cell,
                    "grid cell to corrupt in queries (row-major; -1 = none)");
    gen->add_option("--grid", gen_grid, "grid the corrupt cell is addressed under (RxC)");
    gen->add_option("--corrupt-mode", gen_mode, "blackout|noise|brightness");
    gen->add_option("--tolerance", gen_tolerance, "tolerance written to the ground truth");

    // train
    auto* train = app.add_subcommand("train", "train an ensemble on a reference directory");
    std::string train_refs, train_out, train_grid = "3x1", train_voting = "soft";
    int train_z = 4, train_threads = 0;
    uint64_t train_seed = 0;
    droso::UnitConfig train_unit;
    train->add_option("--refs", train_refs, "reference image directory")->required();
    train->add_option("--out", train_out, "output ensemble file")->required();
    train->add_option("--grid", train_grid, "patch grid RxC");
    train->add_option("--z", train_z, "units per patch");
    train->add_option("--voting", train_voting, "soft|hard")
        ->check(CLI::IsMember({"soft", "hard"}));
    train->add_option("--seed", train_seed, "master seed");
    train->add_option("--threads", train_threads, "worker threads (0 = all cores)");
    train->add_option("--hidden", train_unit.hidden_units, "hidden units per unit");
    train->add_option("--density", train_unit.projection_density, "projection density");
    train->add_option("--wta", train_unit.wta_keep_fraction, "WTA keep fraction");
    train->add_option("--lr", train_unit.learning_rate, "learning rate");
    train->add_option("--epochs", train_unit.epochs, "training epochs");

    // eval
    auto* eval = app.add_subcommand("eval", "match queries and write the evaluation report");
    std::string eval_ens, eval_queries, eval_truth, eval_out;
    int eval_threads = 0, eval_tolerance = -1;
    eval->add_option("--ensemble", eval_ens, "trained ensemble file")->required();
    eval->add_option("--queries", eval_queries, "query image directory")->required();
    eval->add_option("--truth", eval_truth, "ground truth file")->required();
    eval->add_option("--out", eval_out, "output directory")->required();
    eval->add_option("--tolerance", eval_tolerance,
                     "frame tolerance (overrides the ground truth header; -1 = keep)");
    eval->add_option("--threads", eval_threads, "worker threads (0 = all cores)");

    // bench
    auto* bench = app.add_subcommand("bench", "time per-query matching");
    std::string bench_ens, bench_queries, bench_out;
    int bench_repeats = 1;
    bench->add_option("--ensemble", bench_ens, "trained ensemble file")->required();
    bench->add_option("--queries", bench_queries, "query image directory")->required();
    bench->add_option("--out", bench_out, "output directory")->required();
    bench->add_option("--repeats", bench_repeats, "full passes over the query set");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            droso::GenOptions opt;
            opt.out_dir = gen_out;
            opt.tolerance = gen_tolerance;
            opt.spec.n_places = gen_places;
            opt.spec.image_rows = gen_rows;
            opt.spec.image_cols = gen_cols;
            opt.spec.base_seed = gen_seed;
            opt.spec.noise_sigma = gen_noise;
            opt.spec.shift_cols = gen_shift;
            if (gen_corrupt_cell >= 0) {
                droso::CorruptRegion cr;
                cr.grid = parse_grid(gen_grid);
                cr.cell = gen_corrupt_cell;
                cr.mode = parse_corrupt_mode(gen_mode);
                opt.spec.corrupt_region = cr;
            }
            droso::run_gen(opt);
            std::printf("wrote %d reference/query pairs under %s\n", gen_places,
                        gen_out.c_str());
        } else if (train->parsed()) {
            droso::TrainOptions opt;
            opt.refs_dir = train_refs;
            opt.out_path = train_out;
            opt.threads = train_threads;
            opt.config.grid = parse_grid(train_grid);
            opt.config.units_per_patch = train_z;
            opt.config.unit_config = train_unit;
            opt.config.voting_mode = train_voting == "hard" ? droso::VotingMode::hard
                                                            : droso::VotingMode::soft;
            opt.config.master_seed = train_seed;
            const droso::TrainSummary s = droso::run_train(opt);
            std::printf("trained %d places, grid %dx%d, z=%d: T=%llu C=%llu -> %s\n",
                        s.n_places, opt.config.grid.rows, opt.config.grid.cols,
                        opt.config.units_per_patch,
                        static_cast<unsigned long long>(s.size.total_units),
                        static_cast<unsigned long long>(s.size.calls_per_query),
                        train_out.c_str());
        } else if (eval->parsed()) {
            droso::EvalOptions opt;
            opt.ensemble_path = eval_ens;
            opt.queries_dir = eval_queries;
            opt.truth_path = eval_truth;
            opt.out_dir = eval_out;
            opt.threads = eval_threads;
            if (eval_tolerance >= 0)
                opt.tolerance_override = eval_tolerance;
            const droso::EvalReport r = droso::run_eval(opt);
            std::printf("evaluated %zu queries: accuracy=%.4f auc=%.4f "
                        "mean_query_us=%.1f -> %s\n",
                        r.records.size(), r.accuracy, r.auc_value, r.timing.mean_us,
                        eval_out.c_str());
        } else if (bench->parsed()) {
            droso::BenchOptions opt;
            opt.ensemble_path = bench_ens;
            opt.queries_dir = bench_queries;
            opt.out_dir = bench_out;
            opt.repeats = bench_repeats;
            const droso::BenchReport r = droso::run_bench(opt);
            std::printf("bench: mean=%.1fus median=%.1fus min=%.1fus max=%.1fus -> %s\n",
                        r.timing.mean_us, r.timing.median_us, r.timing.min_us,
                        r.timing.max_us, bench_out.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
