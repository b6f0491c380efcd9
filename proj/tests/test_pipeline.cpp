#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "patchdroso/errors.hpp"
#include "patchdroso/pipeline.hpp"
#include "patchdroso/serialize.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace droso;
using testutil::TempDir;

namespace {

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

size_t count_files(const fs::path& dir) {
    size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir))
        n += e.is_regular_file() ? 1 : 0;
    return n;
}

size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    size_t n = 0;
    std::string line;
    while (std::getline(in, line))
        ++n;
    return n;
}

GenOptions small_gen(const std::string& out_dir, uint64_t seed, int places = 6) {
    GenOptions opt;
    opt.out_dir = out_dir;
    opt.spec.n_places = places;
    opt.spec.image_rows = 64;
    opt.spec.image_cols = 128;
    opt.spec.base_seed = seed;
    return opt;
}

}  // namespace

TEST_CASE("run_gen: writes the dataset layout deterministically") {
    TempDir tmp;
    run_gen(small_gen(tmp.file("data"), 5));
    CHECK(count_files(tmp.path / "data" / "references") == 6);
    CHECK(count_files(tmp.path / "data" / "queries") == 6);
    CHECK(fs::exists(tmp.path / "data" / "ground_truth.txt"));

    run_gen(small_gen(tmp.file("again"), 5));
    CHECK(file_bytes(tmp.file("data/references/place_00003.png")) ==
          file_bytes(tmp.file("again/references/place_00003.png")));
    CHECK(file_bytes(tmp.file("data/ground_truth.txt")) ==
          file_bytes(tmp.file("again/ground_truth.txt")));
}

TEST_CASE("run_gen: corruption stays inside the addressed band") {
    TempDir tmp;
    GenOptions opt = small_gen(tmp.file("data"), 9);
    opt.spec.image_rows = 96;
    opt.spec.image_cols = 192;
    CorruptRegion cr;
    cr.grid = {3, 1};
    cr.cell = 0;
    cr.mode = CorruptMode::blackout;
    opt.spec.corrupt_region = cr;
    run_gen(opt);

    const ImageTensor ref = load_image(tmp.file("data/references/place_00000.png"));
    const ImageTensor query = load_image(tmp.file("data/queries/place_00000.png"));
    for (int r = 0; r < 96; ++r)
        for (int c = 0; c < 192; ++c) {
            if (r < 32)
                CHECK(query.at(r, c) == 0.0);
            else
                CHECK(query.at(r, c) == ref.at(r, c));
        }
}

TEST_CASE("run_train: reports T and C and serializes the ensemble") {
    TempDir tmp;
    run_gen(small_gen(tmp.file("data"), 21, 4));

    TrainOptions topt;
    topt.refs_dir = tmp.file("data/references");
    topt.out_path = tmp.file("ens.pdn");
    topt.config.grid = {3, 1};
    topt.config.units_per_patch = 16;
    topt.config.unit_config.epochs = 2;
    const TrainSummary s = run_train(topt);
    CHECK(s.n_places == 4);
    CHECK(s.size.total_units == 48);
    CHECK(s.size.calls_per_query == 144);
    CHECK(load_ensemble(tmp.file("ens.pdn")).n_places == 4);

    topt.config.grid = {4, 2};
    topt.config.units_per_patch = 8;
    topt.out_path = tmp.file("ens2.pdn");
    const TrainSummary s2 = run_train(topt);
    CHECK(s2.size.total_units == 64);
    CHECK(s2.size.calls_per_query == 512);

    topt.config.grid = {1, 1};
    topt.out_path = tmp.file("ens3.pdn");
    const TrainSummary s3 = run_train(topt);
    CHECK(s3.size.total_units == 8);
    CHECK(s3.size.calls_per_query == 8);
}

TEST_CASE("run_gen: unwritable output directory is an I/O error") {
    TempDir tmp;
    std::ofstream(tmp.file("blocker")) << "a file where the dir should go";
    GenOptions opt = small_gen(tmp.file("blocker/data"), 1, 2);
    CHECK_THROWS_AS(run_gen(opt), IoError);
}

TEST_CASE("run_train: user errors") {
    TempDir tmp;
    TrainOptions topt;
    topt.refs_dir = tmp.file("nope");
    topt.out_path = tmp.file("ens.pdn");
    CHECK_THROWS(run_train(topt));

    fs::create_directories(tmp.file("one"));
    save_image_png(testutil::random_image(32, 64, 1), tmp.file("one/a.png"));
    topt.refs_dir = tmp.file("one");
    CHECK_THROWS_AS(run_train(topt), std::invalid_argument);
}

TEST_CASE("run_eval: writes reports; row count equals query count") {
    TempDir tmp;
    run_gen(small_gen(tmp.file("data"), 33));

    TrainOptions topt;
    topt.refs_dir = tmp.file("data/references");
    topt.out_path = tmp.file("ens.pdn");
    topt.config.grid = {2, 1};
    topt.config.units_per_patch = 2;
    run_train(topt);

    EvalOptions eopt;
    eopt.ensemble_path = tmp.file("ens.pdn");
    eopt.queries_dir = tmp.file("data/queries");
    eopt.truth_path = tmp.file("data/ground_truth.txt");
    eopt.out_dir = tmp.file("out");
    const EvalReport report = run_eval(eopt);

    CHECK(report.records.size() == 6);
    CHECK(report.accuracy == 1.0);  // identity queries memorized
    CHECK(count_lines(tmp.file("out/report.csv")) == 7);  // header + 6 rows
    CHECK(count_lines(tmp.file("out/predictions.csv")) == 7);
    CHECK(fs::exists(tmp.file("out/summary.json")));
    CHECK(fs::exists(tmp.file("out/pr_curve.svg")));

    SUBCASE("empty query dir is a user error") {
        fs::create_directories(tmp.file("empty"));
        eopt.queries_dir = tmp.file("empty");
        CHECK_THROWS_AS(run_eval(eopt), std::invalid_argument);
    }

    SUBCASE("ground truth referencing unknown places is a user error") {
        std::ofstream gt(tmp.file("bad_truth.txt"));
        gt << "# tolerance 0\n";
        for (int q = 0; q < 6; ++q)
            gt << q << ' ' << (q + 100) << '\n';
        gt.close();
        eopt.truth_path = tmp.file("bad_truth.txt");
        CHECK_THROWS_AS(run_eval(eopt), std::invalid_argument);
    }
}

TEST_CASE("run_bench: schema and repeat-invariant predictions") {
    TempDir tmp;
    run_gen(small_gen(tmp.file("data"), 41, 4));

    TrainOptions topt;
    topt.refs_dir = tmp.file("data/references");
    topt.out_path = tmp.file("ens.pdn");
    topt.config.grid = {1, 1};
    topt.config.units_per_patch = 2;
    topt.config.unit_config.epochs = 10;
    run_train(topt);

    BenchOptions bopt;
    bopt.ensemble_path = tmp.file("ens.pdn");
    bopt.queries_dir = tmp.file("data/queries");
    bopt.out_dir = tmp.file("bench");
    const BenchReport a = run_bench(bopt);
    CHECK(a.timing.mean_us > 0.0);
    CHECK(a.timing.median_us > 0.0);
    CHECK(a.timing.min_us > 0.0);
    CHECK(a.timing.max_us >= a.timing.min_us);
    CHECK(fs::exists(tmp.file("bench/timing.csv")));
    CHECK(fs::exists(tmp.file("bench/bench_summary.json")));

    bopt.out_dir = tmp.file("bench2");
    const BenchReport b = run_bench(bopt);
    CHECK(a.predictions == b.predictions);
    CHECK(file_bytes(tmp.file("bench/bench_predictions.csv")) ==
          file_bytes(tmp.file("bench2/bench_predictions.csv")));
}

TEST_CASE("gen->train->eval is deterministic across runs and thread counts") {
    TempDir tmp;
    for (int run = 0; run < 2; ++run) {
        const std::string root = tmp.file("run" + std::to_string(run));
        GenOptions gopt = small_gen(root + "/data", 4242);
        gopt.spec.noise_sigma = 0.05;
        run_gen(gopt);

        TrainOptions topt;
        topt.refs_dir = root + "/data/references";
        topt.out_path = root + "/ens.pdn";
        topt.config.grid = {2, 2};
        topt.config.units_per_patch = 2;
        topt.config.unit_config.epochs = 15;
        topt.config.master_seed = 7;
        topt.threads = run == 0 ? 1 : 3;
        run_train(topt);

        EvalOptions eopt;
        eopt.ensemble_path = root + "/ens.pdn";
        eopt.queries_dir = root + "/data/queries";
        eopt.truth_path = root + "/data/ground_truth.txt";
        eopt.out_dir = root + "/out";
        eopt.threads = run == 0 ? 2 : 1;
        run_eval(eopt);
    }
    CHECK(file_bytes(tmp.file("run0/ens.pdn")) == file_bytes(tmp.file("run1/ens.pdn")));
    CHECK(file_bytes(tmp.file("run0/out/predictions.csv")) ==
          file_bytes(tmp.file("run1/out/predictions.csv")));
}

TEST_CASE("cli binary: exit codes and diagnostics") {
    const char* bin = std::getenv("PATCHDROSO_BIN");
    if (bin == nullptr) {
        MESSAGE("PATCHDROSO_BIN not set; skipping CLI subprocess checks");
        return;
    }
    TempDir tmp;

    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(bin) + " " + args + " >" +
                                tmp.file("stdout.txt") + " 2>" + tmp.file("stderr.txt");
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };

    CHECK(run("gen --places 3 --seed 1 --rows 64 --cols 128 --out " +
              tmp.file("data")) == 0);
    CHECK(count_files(tmp.path / "data" / "references") == 3);

    CHECK(run("train --refs " + tmp.file("data/references") + " --grid 2x1 --z 1 " +
              "--epochs 2 --out " + tmp.file("ens.pdn")) == 0);
    {
        std::ifstream out(tmp.file("stdout.txt"));
        std::string text((std::istreambuf_iterator<char>(out)),
                         std::istreambuf_iterator<char>());
        CHECK(text.find("T=2") != std::string::npos);
        CHECK(text.find("C=4") != std::string::npos);
    }

    // failure paths: nonzero exit and a one-line diagnostic on stderr
    CHECK(run("train --refs " + tmp.file("missing_dir") + " --out " +
              tmp.file("x.pdn")) == 1);
    {
        std::ifstream err(tmp.file("stderr.txt"));
        std::string line;
        REQUIRE(std::getline(err, line));
        CHECK(line.rfind("error:", 0) == 0);
    }

    fs::create_directories(tmp.file("empty"));
    CHECK(run("eval --ensemble " + tmp.file("ens.pdn") + " --queries " +
              tmp.file("empty") + " --truth " + tmp.file("data/ground_truth.txt") +
              " --out " + tmp.file("out")) == 1);

    CHECK(run("definitely-not-a-command") != 0);
}

TEST_CASE("cli binary: corruption flags reach the generator") {
    const char* bin = std::getenv("PATCHDROSO_BIN");
    if (bin == nullptr) {
        MESSAGE("PATCHDROSO_BIN not set; skipping CLI subprocess checks");
        return;
    }
    TempDir tmp;
    const std::string cmd = std::string(bin) +
                            " gen --places 2 --seed 6 --corrupt-cell 0 --grid 3x1 " +
                            "--corrupt-mode blackout --out " + tmp.file("data") +
                            " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const ImageTensor q = load_image(tmp.file("data/queries/place_00000.png"));
    const ImageTensor ref = load_image(tmp.file("data/references/place_00000.png"));
    for (int r = 0; r < q.rows; ++r)
        for (int c = 0; c < q.cols; ++c) {
            if (r < q.rows / 3)
                CHECK(q.at(r, c) == 0.0);
            else
                CHECK(q.at(r, c) == ref.at(r, c));
        }
}

TEST_CASE("cli binary: config file provides defaults, flags win") {
    const char* bin = std::getenv("PATCHDROSO_BIN");
    if (bin == nullptr) {
        MESSAGE("PATCHDROSO_BIN not set; skipping CLI subprocess checks");
        return;
    }
    TempDir tmp;
    run_gen(small_gen(tmp.file("data"), 3, 4));
    std::ofstream(tmp.file("run.toml")) << "[train]\ngrid=\"2x1\"\nz=4\nepochs=2\n";

    auto run = [&](const std::string& args, const std::string& log) {
        const std::string cmd = std::string(bin) + " " + args + " >" + tmp.file(log) +
                                " 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    auto contents = [&](const std::string& log) {
        std::ifstream in(tmp.file(log));
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };

    REQUIRE(run("--config " + tmp.file("run.toml") + " train --refs " +
                tmp.file("data/references") + " --out " + tmp.file("a.pdn"),
                "a.log") == 0);
    CHECK(contents("a.log").find("T=8 C=16") != std::string::npos);  // from config

    REQUIRE(run("--config " + tmp.file("run.toml") + " train --refs " +
                tmp.file("data/references") + " --out " + tmp.file("b.pdn") + " --z 1",
                "b.log") == 0);
    CHECK(contents("b.log").find("T=2 C=4") != std::string::npos);  // flag wins
}
