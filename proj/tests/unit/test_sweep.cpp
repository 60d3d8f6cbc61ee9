#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "embcomp/error.hpp"
#include "embcomp/report.hpp"
#include "embcomp/sweep.hpp"
#include "embcomp/synthetic.hpp"
#include "fixtures/table1.hpp"
#include "oracles/pareto_oracle.hpp"

using namespace embcomp;

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::vector<ConfigPoint> table1_points() {
    std::vector<ConfigPoint> pts;
    for (const auto& r : fixtures::kTable1)
        pts.push_back(make_point("bge", r.dtype, r.ratio, fixtures::kBgeDims, 1000000, r.bge));
    return pts;
}

std::vector<ConfigPoint> random_points(std::mt19937& gen, std::size_t n) {
    std::vector<ConfigPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        ConfigPoint p;
        p.model = "m";
        p.dtype = kAllDTypes[gen() % kAllDTypes.size()];
        p.ratio = kCanonicalRatios[gen() % 5];
        p.storage_bytes = 1 + gen() % 60;  // small range forces ties
        p.score = static_cast<double>(gen() % 25) / 25.0;
        pts.push_back(p);
    }
    return pts;
}

bool same_point(const ConfigPoint& a, const ConfigPoint& b) { return a == b; }

}  // namespace

TEST_CASE("compression ratio matches the reference column") {
    for (const auto& r : fixtures::kTable1) {
        CAPTURE(dtype_name(r.dtype));
        CAPTURE(r.ratio);
        CHECK(round2(compression_ratio(r.dtype, r.ratio, fixtures::kBgeDims)) == r.compression_ratio);
    }
    CHECK(compression_ratio(DType::f8e4m3, 0.5, 384) == 8.0);
    CHECK(compression_ratio(DType::binary, 0.25, 384) == 128.0);
}

TEST_CASE("storage bytes") {
    CHECK(storage_bytes(1000000, 1536, 1.0, DType::f32) == 6144000000ull);
    CHECK(storage_bytes(10, 384, 0.5, DType::f8e4m3) == 1920);
    CHECK(storage_bytes(10, 384, 0.9, DType::binary) == 10 * 44);  // 346 bits -> 44 bytes
    CHECK(storage_bytes(3, 5, 1.0, DType::f4e2m1) == 9);
}

TEST_CASE("frontier on a hand example") {
    std::vector<ConfigPoint> pts = {
        make_point("m", DType::f32, 1.0, 8, 1, 0.9),
        make_point("m", DType::f16, 1.0, 8, 1, 0.9),   // same score, half the storage
        make_point("m", DType::f8e4m3, 1.0, 8, 1, 0.85),
        make_point("m", DType::int8, 1.0, 8, 1, 0.8),  // same storage as f8, worse
        make_point("m", DType::binary, 1.0, 8, 1, 0.5),
    };
    const auto f = pareto_frontier(pts);
    REQUIRE(f.size() == 3);
    CHECK(f[0].dtype == DType::binary);
    CHECK(f[1].dtype == DType::f8e4m3);
    CHECK(f[2].dtype == DType::f16);
}

TEST_CASE("frontier and budget selection match the oracles") {
    std::mt19937 gen(41);
    for (int inst = 0; inst < 100; ++inst) {
        const auto pts = random_points(gen, 1 + gen() % 200);
        const auto f = pareto_frontier(pts);
        const auto ref = oracle::frontier_quadratic(pts);
        REQUIRE(f.size() == ref.size());
        for (const auto& p : ref) REQUIRE(std::any_of(f.begin(), f.end(), [&](const auto& q) { return same_point(p, q); }));
        for (std::size_t i = 1; i < f.size(); ++i) {
            REQUIRE(f[i - 1].storage_bytes <= f[i].storage_bytes);
            REQUIRE(f[i - 1].score <= f[i].score);
        }
        for (std::uint64_t budget : {0ull, 1ull, 10ull, 30ull, 61ull}) {
            const auto* want = oracle::budget_scan(pts, budget);
            if (!want) {
                REQUIRE_THROWS_AS(select_for_budget(pts, budget), InfeasibleBudget);
                continue;
            }
            const ConfigPoint got = select_for_budget(pts, budget);
            REQUIRE(got.score == want->score);
            REQUIRE(got.storage_bytes == want->storage_bytes);
        }
    }
}

TEST_CASE("budget selection on the reference bge rows") {
    const auto pts = table1_points();
    const std::uint64_t cr8 = storage_bytes(1000000, fixtures::kBgeDims, 0.5, DType::f8e5m2);
    const ConfigPoint c = select_for_budget(pts, cr8);
    CHECK(c.dtype == DType::f8e5m2);
    CHECK(c.ratio == 0.5);
    CHECK(c.score == 0.574);
    const ConfigPoint all = select_for_budget(pts, storage_bytes(1000000, fixtures::kBgeDims, 1.0, DType::f32));
    CHECK(all.score == 0.595);
    CHECK(all.dtype == DType::bf16);  // ties go to the smaller storage, then the dtype name
    CHECK_THROWS_WITH_AS(select_for_budget(pts, 10), doctest::Contains("binary"), InfeasibleBudget);
    CHECK_THROWS_AS(select_for_budget({}, 10), ValidationError);
}

TEST_CASE("budget parsing") {
    CHECK(parse_budget("phone=2G").bytes == 2000000000ull);
    CHECK(parse_budget("phone=2G").label == "phone");
    CHECK(parse_budget("1MiB").bytes == 1048576ull);
    CHECK(parse_budget("edge=512").bytes == 512);
    CHECK(parse_budget("x=1.5K").bytes == 1500);
    CHECK_THROWS_AS(parse_budget("x=abc"), ValidationError);
    CHECK_THROWS_AS(parse_budget("x=-1"), ValidationError);
}

TEST_CASE("plot is well-formed SVG with one marker per point") {
    const auto pts = table1_points();
    const auto front = pareto_frontier(pts);
    const std::string svg = render_plot(pts, front, {{"phone", 200000000}, {"edge & tiny", 50000000}});
    std::istringstream in(svg);
    boost::property_tree::ptree tree;
    REQUIRE_NOTHROW(boost::property_tree::read_xml(in, tree));
    std::size_t points = 0, series = 0, budgets = 0, frontier = 0;
    for (const auto& [name, child] : tree.get_child("svg")) {
        const std::string cls = child.get("<xmlattr>.class", "");
        if (name == "g" && cls == "series") {
            ++series;
            for (const auto& [n2, c2] : child)
                if (n2 == "circle") ++points;
        }
        if (name == "line" && cls == "budget") ++budgets;
        if (name == "polyline" && cls == "frontier") ++frontier;
    }
    CHECK(points == pts.size());
    CHECK(series == 8);
    CHECK(budgets == 2);
    CHECK(frontier == 1);
    CHECK(svg.find("edge &amp; tiny") != std::string::npos);
    CHECK(render_plot(pts, front, {}) == render_plot(pts, front, {}));

    PlotOptions loss;
    loss.axis = PlotAxis::percent_loss;
    std::istringstream in2(render_plot(pts, front, {}, loss));
    CHECK_NOTHROW(boost::property_tree::read_xml(in2, tree));
}

TEST_CASE("small sweep") {
    SyntheticSpec spec;
    spec.docs = 400;
    spec.queries = 50;
    spec.calibration = 200;
    spec.dims = 24;
    const SyntheticCorpus c = make_synthetic_corpus(spec);
    SweepOptions opts;
    opts.model = "syn";
    opts.dtypes = {DType::f16, DType::binary};
    opts.ratios = {1.0, 0.5};
    const SweepResult r = run_sweep({c.dataset}, c.calibration, opts);
    REQUIRE(r.points.size() == 4);
    CHECK(r.failures.empty());
    CHECK(r.points[0].dtype == DType::f16);
    CHECK(r.points[0].ratio == 1.0);
    CHECK(r.points[1].ratio == 0.5);
    CHECK(r.points[2].dtype == DType::binary);
    CHECK(r.storage_rows == 400);
    CHECK(r.points[1].dims_kept == 12);
    CHECK(r.points[1].storage_bytes == 400 * 24);

    const std::string csv = sweep_csv(r);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == kCsvHeader);
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.rfind("weighted,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 4);

    const nlohmann::json j = to_json(r);
    CHECK(points_from_json(j).size() == 4);
    CHECK(points_from_json(j)[1] == r.points[1]);
    CHECK(dump(j) == dump(to_json(run_sweep({c.dataset}, c.calibration, opts))));
}

TEST_CASE("sweep records per-config failures and continues") {
    SyntheticSpec spec;
    spec.docs = 60;
    spec.queries = 10;
    spec.calibration = 5;  // too few rows for PCA at k = 12
    spec.dims = 24;
    const SyntheticCorpus c = make_synthetic_corpus(spec);
    SweepOptions opts;
    opts.dtypes = {DType::f32};
    opts.ratios = {1.0, 0.5};
    const SweepResult r = run_sweep({c.dataset}, c.calibration, opts);
    CHECK(r.points.size() == 1);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].ratio == 0.5);
}

TEST_CASE("pareto json") {
    const auto pts = table1_points();
    const auto front = pareto_frontier(pts);
    BudgetSelection ok{{"big", 1ull << 40}, select_for_budget(pts, 1ull << 40), std::nullopt};
    BudgetSelection none{{"tiny", 1}, std::nullopt, pareto_frontier(pts).front()};
    const nlohmann::json j = pareto_json(pts, front, {ok, none});
    CHECK(j.at("frontier").size() == front.size());
    CHECK(j.at("budgets").size() == 2);
}
