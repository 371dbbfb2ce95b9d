#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "holdout/cli.hpp"
#include "holdout/io.hpp"
#include "support/fixtures.hpp"

using namespace holdout;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::set<std::string> column_values(const fs::path& csv, std::size_t column) {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    std::set<std::string> values;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string field;
        for (std::size_t c = 0; c <= column; ++c) std::getline(ss, field, ',');
        values.insert(field);
    }
    return values;
}

// simulate -> fit -> waterline -> classify -> report in `dir`.
void pipeline(const fs::path& dir) {
    const std::string out = dir.string();
    REQUIRE(run({"simulate", "--out", out, "--n-samples", "400", "--seed", "21"}).code == 0);
    REQUIRE(run({"fit", "--train", out + "/simulated.csv", "--out", out, "--grid", "128", "--restarts", "2"}).code == 0);
    REQUIRE(run({"waterline", "--out", out, "--grid", "128", "--target-x", "0.99"}).code == 0);
    REQUIRE(run({"classify", "--out", out, "--test", out + "/simulated.csv"}).code == 0);
    REQUIRE(run({"report", "--out", out, "--model", out + "/model.json", "--x-cut", "0.4", "--y-cut", "0.3"}).code == 0);
}

io::ModelFile overlapping_model() {
    io::ModelFile f;
    const QuadratureSpec grid{64, 64};
    f.positive = DensityModel::from_params(default_negative_params(), grid);
    f.negative = DensityModel::from_params(default_negative_params(), grid);
    f.prevalence = 0.5;
    return f;
}

}  // namespace

TEST_CASE("full pipeline produces every artifact") {
    const auto dir = fixtures::scratch_dir("cli_pipeline");
    pipeline(dir);
    for (const char* name : {"simulated.csv", "simulated_spec.json", "model.json", "decisions.csv", "report.json",
                             "report.txt"})
        CHECK(fs::exists(dir / name));
    CHECK(column_values(dir / "decisions.csv", 2) == std::set<std::string>{"pos", "neg", "indeterminate"});

    const auto grids = run({"grids", "--out", dir.string(), "--grid", "128"});
    CHECK(grids.code == 0);
    CHECK(column_values(dir / "domain_grid.csv", 2).size() == 3);
    for (const auto& z : column_values(dir / "zstar_grid.csv", 2)) CHECK(std::stod(z) >= 0.5);
    CHECK(fs::exists(dir / "zstar_left.csv"));
    CHECK(fs::exists(dir / "domain_right.csv"));
    CHECK(column_values(dir / "contours.csv", 3).count("solved") == 1);

    const auto v = run({"validate", "--out", dir.string()});
    CHECK(v.code == 0);
    CHECK(v.out.find("certificate: passed") != std::string::npos);
    CHECK(fs::exists(dir / "certificate.csv"));
}

TEST_CASE("reruns are byte-identical") {
    const auto a = fixtures::scratch_dir("cli_det_a"), b = fixtures::scratch_dir("cli_det_b");
    pipeline(a);
    pipeline(b);
    for (const char* name : {"simulated.csv", "model.json", "decisions.csv", "report.json", "report.txt"})
        CHECK_MESSAGE(io::read_file(a / name) == io::read_file(b / name), name);
}

TEST_CASE("waterline summaries") {
    const auto dir = fixtures::scratch_dir("cli_summary");
    const std::string out = dir.string();
    io::ModelFile f;
    f.positive = DensityModel::from_params(default_positive_params(), {128, 128});
    f.negative = DensityModel::from_params(default_negative_params(), {128, 128});
    f.prevalence = 0.5;
    io::save_model(dir / "model.json", f);

    const auto easy = run({"waterline", "--out", out, "--grid", "128", "--target-x", "0.6"});
    CHECK(easy.code == 0);
    CHECK(easy.out.find("unconstrained") != std::string::npos);
    CHECK(easy.out.find("z0 = 0.500000000") != std::string::npos);

    const auto strict = run({"waterline", "--out", out, "--grid", "128", "--target-x", "0.97", "--min-specificity",
                             "0.999"});
    CHECK(strict.code == 0);
    const auto wl = *io::load_model(dir / "model.json").waterline;
    CHECK(wl.z_pos > wl.z0);
}

TEST_CASE("config file supplies defaults that flags override") {
    const auto dir = fixtures::scratch_dir("cli_config");
    const std::string out = dir.string();
    io::ModelFile f;
    f.positive = DensityModel::from_params(default_positive_params(), {128, 128});
    f.negative = DensityModel::from_params(default_negative_params(), {128, 128});
    f.prevalence = 0.5;
    io::save_model(dir / "model.json", f);
    io::write_file(dir / "run.ini", "target-x = 0.6\ngrid = 128\nout = " + out + "\n");

    const auto from_file = run({"waterline", "--config", (dir / "run.ini").string()});
    CHECK(from_file.code == 0);
    CHECK(from_file.out.find("unconstrained") != std::string::npos);
    const auto overridden = run({"waterline", "--config", (dir / "run.ini").string(), "--target-x", "0.99"});
    CHECK(overridden.code == 0);
    CHECK(overridden.out.find("unconstrained") == std::string::npos);
}

TEST_CASE("domain map without a waterline is binary") {
    const auto dir = fixtures::scratch_dir("cli_binary");
    io::ModelFile f;
    f.positive = DensityModel::from_params(default_positive_params(), {64, 64});
    f.negative = DensityModel::from_params(default_negative_params(), {64, 64});
    f.prevalence = 0.5;
    io::save_model(dir / "model.json", f);
    CHECK(run({"grids", "--out", dir.string(), "--grid", "64"}).code == 0);
    CHECK(column_values(dir / "domain_grid.csv", 2) == std::set<std::string>{"pos", "neg"});
}

TEST_CASE("exit codes") {
    const auto dir = fixtures::scratch_dir("cli_codes");
    const std::string out = dir.string();

    CHECK(run({"fit", "--bogus"}).code == cli::kConfigError);
    CHECK(run({}).code == cli::kConfigError);
    CHECK(run({"waterline", "--target-x", "1.5"}).code == cli::kConfigError);
    CHECK(run({"waterline", "--grid", "16"}).code == cli::kConfigError);
    CHECK(run({"fit"}).code == cli::kConfigError);
    CHECK(run({"fit", "--train", out + "/missing.csv", "--out", out}).code == cli::kDataError);

    io::write_file(dir / "pos_only.csv", "total_igg,sars_igg_sum,label\n10,20,pos\n30,40,pos\n");
    const auto one_class = run({"fit", "--train", out + "/pos_only.csv", "--out", out});
    CHECK(one_class.code == cli::kDataError);
    CHECK(one_class.err.find("no negative samples") != std::string::npos);

    io::save_model(dir / "model.json", overlapping_model());
    CHECK(run({"classify", "--out", out, "--test", out + "/pos_only.csv"}).code == cli::kDataError);
    CHECK(run({"waterline", "--out", out, "--grid", "64", "--target-x", "0.9"}).code == cli::kInfeasible);

    io::ModelFile solved;
    solved.positive = DensityModel::from_params(default_positive_params(), {64, 64});
    solved.negative = DensityModel::from_params(default_negative_params(), {64, 64});
    solved.prevalence = 0.5;
    io::save_model(dir / "model.json", solved);
    REQUIRE(run({"waterline", "--out", out, "--grid", "64", "--target-x", "0.98"}).code == 0);
    auto perturbed = io::load_model(dir / "model.json");
    perturbed.waterline->z_neg += 0.05;
    io::save_model(dir / "model.json", perturbed);
    const auto v = run({"validate", "--out", out});
    CHECK(v.code == cli::kCertificateFailed);
    CHECK(v.out.find("violation at") != std::string::npos);
}
