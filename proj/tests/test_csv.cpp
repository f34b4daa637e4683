#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "rdbench/config.hpp"
#include "rdbench/csv.hpp"

using namespace rdbench;

TEST_CASE("csv parse and write round-trip byte-identically") {
    std::string text =
        "sequence,variant,qp,bitrate_kbps,vmaf,vmaf_neg,psnr_y,ms_ssim\n"
        "Beauty,baseline,22,101930.000,92.4800,90.1200,41.2000,0.99120\n"
        "Beauty,baseline,27,44120.500,90.0100,88.3000,39.8800,0.98700\n";
    std::istringstream in(text);
    auto table = csv::parse(in);
    REQUIRE(table.header.size() == 8);
    REQUIRE(table.rows.size() == 2);
    std::ostringstream out;
    csv::write(out, table);
    CHECK(out.str() == text);
}

TEST_CASE("quoted fields survive the round-trip") {
    std::string text = "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n";
    std::istringstream in(text);
    auto table = csv::parse(in);
    REQUIRE(table.rows[0][0] == "x,y");
    REQUIRE(table.rows[0][1] == "say \"hi\"");
    std::ostringstream out;
    csv::write(out, table);
    CHECK(out.str() == text);
}

TEST_CASE("parse errors carry line numbers") {
    std::istringstream in("a,b\n1,2\n3\n");
    try {
        csv::parse(in);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    std::istringstream bad_num("sequence,variant,qp,bitrate_kbps,vmaf,vmaf_neg,psnr_y,ms_ssim\n"
                               "s,v,22,oops,90,88,40,0.9\n");
    auto table = csv::parse(bad_num);
    try {
        csv::read_per_qp(table);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("per-qp reader rejects duplicate keys and resolves aliases") {
    std::istringstream dup("sequence,variant,qp,bitrate_kbps,vmaf,vmaf_neg,psnr_y,ms_ssim\n"
                           "s,v,22,100,90,88,40,0.9\n"
                           "s,v,22,101,90,88,40,0.9\n");
    auto t = csv::parse(dup);
    CHECK_THROWS_AS(csv::read_per_qp(t), parse_error);

    // alternative spellings load through the alias table unmodified
    std::istringstream alt("clip,leg,QP,bitrate,VMAF,vmaf-neg,psnr,ms-ssim\n"
                           "s,v,22,100,90,88,40,0.9\n");
    auto t2 = csv::parse(alt);
    auto rows = csv::read_per_qp(t2);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].sequence == "s");
    CHECK(rows[0].variant == "v");
    CHECK(rows[0].bitrate_kbps == 100.0);

    std::istringstream missing("clip,qp,bitrate,VMAF,vmaf-neg,psnr,ms-ssim\n"
                               "s,22,100,90,88,40,0.9\n");
    auto t3 = csv::parse(missing);
    CHECK_THROWS_AS(csv::read_per_qp(t3), config_error);
}

TEST_CASE("summary reader handles the bd alias family") {
    std::istringstream in("sequence,BD-VMAF,BD-VMAF-NEG,BD-PSNR-Y,BD-MS-SSIM\n"
                          "Beauty,-39.83,-9.84,+39.20,+20.00\n");
    auto t = csv::parse(in);
    auto rows = csv::read_summary(t);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].bd.at(MetricKind::vmaf) == -39.83);
    CHECK(rows[0].bd.at(MetricKind::ms_ssim) == 20.00);  // '+' prefix accepted
}

TEST_CASE("group_curves sorts points by qp") {
    std::vector<csv::PerQpRow> rows;
    for (int qp : {37, 22, 32, 27}) {
        csv::PerQpRow r;
        r.sequence = "s";
        r.variant = "baseline";
        r.qp = qp;
        r.bitrate_kbps = 10000.0 / qp;
        r.vmaf = 100.0 - qp;
        rows.push_back(r);
    }
    auto curves = csv::group_curves(rows);
    REQUIRE(curves.size() == 1);
    const auto& c = curves.begin()->second;
    REQUIRE(c.points.size() == 4);
    CHECK(c.points.front().qp == 22);
    CHECK(c.points.back().qp == 37);
    CHECK(c.is_canonical());
}

TEST_CASE("config file loads every documented key") {
    std::string cfg_text = R"({
        "ffmpeg": "/opt/ffmpeg",
        "qp_grid": [20, 30],
        "workers": 2,
        "baseline_variant": "orig",
        "qp_to_quality": {"qp_lo": 18, "quality_at_lo": 80, "qp_hi": 40, "quality_at_hi": 12},
        "taxonomy": {"regression_pp": 12.5, "saturation_quality": 97.0},
        "gaming": {"threshold_pp": 6.0},
        "slices": [{"name": "all"}, {"name": "excl", "exclude": ["a", "b"]}],
        "csv_aliases": {"vmaf": ["vmaf_score"]}
    })";
    auto path = std::filesystem::temp_directory_path() / "rdbench_cfg_test.json";
    csv::write_file_atomic(path, cfg_text);
    auto cfg = load_config(path);
    CHECK(cfg.ffmpeg_path == "/opt/ffmpeg");
    CHECK(cfg.qp_grid == std::vector<int>{20, 30});
    CHECK(cfg.workers == 2);
    CHECK(cfg.baseline_variant == "orig");
    CHECK(cfg.qp_quality.quality_at_lo == 80);
    CHECK(cfg.taxonomy.regression_pp == 12.5);
    CHECK(cfg.taxonomy.smooth_fraction_min == 0.5);  // untouched default
    CHECK(cfg.gaming_threshold_pp == 6.0);
    REQUIRE(cfg.slices.size() == 2);
    CHECK(cfg.slices[1].exclude == std::vector<std::string>{"a", "b"});
    // extended alias resolves
    std::istringstream in("sequence,variant,qp,bitrate_kbps,vmaf_score,vmaf_neg,psnr_y,ms_ssim\n"
                          "s,v,22,100,90,88,40,0.9\n");
    auto t = csv::parse(in);
    auto rows = csv::read_per_qp(t, cfg.csv_aliases);
    CHECK(rows[0].vmaf == 90.0);
    std::filesystem::remove(path);
}

TEST_CASE("slice spec parsing") {
    auto slices = parse_slice_spec("all;excl_a:a;excl_ab:a+b");
    REQUIRE(slices.size() == 3);
    CHECK(slices[0].name == "all");
    CHECK(slices[0].exclude.empty());
    CHECK(slices[1].exclude == std::vector<std::string>{"a"});
    CHECK(slices[2].exclude == std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS(parse_slice_spec(""), config_error);
}

TEST_CASE("bad config is a config error") {
    auto path = std::filesystem::temp_directory_path() / "rdbench_cfg_bad.json";
    csv::write_file_atomic(path, "{not json");
    CHECK_THROWS_AS(load_config(path), config_error);
    csv::write_file_atomic(path, R"({"workers": 0})");
    CHECK_THROWS_AS(load_config(path), config_error);
    std::filesystem::remove(path);
}
