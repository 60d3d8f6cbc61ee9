#include <cmath>
#include <random>

#include "doctest.h"
#include "embcomp/error.hpp"
#include "embcomp/eval.hpp"
#include "embcomp/synthetic.hpp"
#include "oracles/ndcg_oracle.hpp"

using namespace embcomp;

TEST_CASE("hand-computed nDCG examples") {
    const auto a = ndcg_at_10(std::vector<std::string>{"d2", "d1", "d3"}, {{"d1", 1}});
    REQUIRE(a);
    CHECK(*a == doctest::Approx(0.63093).epsilon(1e-5));
    const auto b = ndcg_at_10(std::vector<std::string>{"b", "a"}, {{"a", 3}, {"b", 1}});
    REQUIRE(b);
    CHECK(*b == doctest::Approx(0.79671).epsilon(1e-5));
    CHECK(*ndcg_at_10(std::vector<std::string>{"d1", "d2"}, {{"d1", 2}, {"d2", 1}}) == doctest::Approx(1.0));
}

TEST_CASE("nDCG edge cases") {
    CHECK_FALSE(ndcg_at_10(std::vector<std::string>{"a"}, {}).has_value());
    CHECK_FALSE(ndcg_at_10(std::vector<std::string>{"a"}, {{"a", 0}}).has_value());
    CHECK(*ndcg_at_10(std::vector<std::string>{}, {{"a", 1}}) == 0.0);
    std::vector<std::string> deep;
    for (int i = 0; i < 15; ++i) deep.push_back("n" + std::to_string(i));
    deep[10] = "rel";
    CHECK(*ndcg_at_10(deep, {{"rel", 3}}) == 0.0);
}

TEST_CASE("nDCG matches the brute-force oracle") {
    std::mt19937 gen(31);
    for (int inst = 0; inst < 300; ++inst) {
        std::vector<std::string> pool;
        for (int i = 0; i < 20; ++i) pool.push_back("d" + std::to_string(i));
        std::shuffle(pool.begin(), pool.end(), gen);
        std::vector<std::string> ranking(pool.begin(), pool.begin() + gen() % 16);
        std::map<std::string, int> q;
        const int judged = static_cast<int>(gen() % 7);
        for (int j = 0; j < judged; ++j) q[pool[gen() % 20]] = static_cast<int>(gen() % 4);
        const auto got = ndcg_at_10(ranking, q);
        const double want = oracle::ndcg10_bruteforce(ranking, q);
        if (want < 0) {
            CHECK_FALSE(got.has_value());
        } else {
            REQUIRE(got);
            REQUIRE(std::fabs(*got - want) <= 1e-9);
        }
    }
}

TEST_CASE("weighted average") {
    CHECK(weighted_average({{"a", 0.5, 1}, {"b", 1.0, 3}}) == doctest::Approx(0.875));
    CHECK(weighted_average({{"a", 0.4, 2}}) == doctest::Approx(0.4));
    CHECK_THROWS_AS(weighted_average({}), ValidationError);
    CHECK_THROWS_AS(weighted_average({{"a", 0.4, 0}}), ValidationError);
}

namespace {

DatasetData planted_fixture() {
    DatasetData d;
    d.name = "planted";
    d.docs = EmbeddingMatrix({"d0", "d1", "d2", "d3"}, 3,
                             {1.f, 0.1f, 0.f, 0.f, 1.f, 0.2f, 0.3f, 0.f, 1.f, -1.f, -0.5f, 0.2f});
    d.queries = EmbeddingMatrix({"q0", "q1", "q2", "q9"}, 3,
                                {1.f, 0.1f, 0.f, 0.f, 1.f, 0.2f, 0.3f, 0.f, 1.f, 1.f, 1.f, 1.f});
    d.qrels = {{"q0", {{"d0", 1}}}, {"q1", {{"d1", 1}}}, {"q2", {{"d2", 2}}}, {"q9", {{"d0", 0}}}};
    d.token_count = 10;
    return d;
}

}  // namespace

TEST_CASE("baseline on planted fixture scores 1") {
    const DatasetData d = planted_fixture();
    PipelineConfig cfg;
    const Pipeline p(cfg, nullptr, 3);
    const DatasetScore s = evaluate_dataset(d, p);
    CHECK(s.mean == doctest::Approx(1.0));
    CHECK(s.scored_queries == 3);
    CHECK(s.excluded_queries == 1);
    CHECK(s.per_query.size() == 3);
}

TEST_CASE("pipeline configuration checks") {
    PipelineConfig int8cfg;
    int8cfg.dtype = DType::int8;
    CHECK_THROWS_AS(Pipeline(int8cfg, nullptr, 3), ValidationError);
    PipelineConfig pca;
    pca.ratio = 0.5;
    CHECK_THROWS_AS(Pipeline(pca, nullptr, 3), ValidationError);
    PipelineConfig none;
    none.ratio = 0.5;
    none.reducer = ReducerKind::none;
    CHECK_THROWS_AS(Pipeline(none, nullptr, 3), ValidationError);
}

TEST_CASE("pipeline reduces then quantizes") {
    SyntheticSpec spec;
    spec.docs = 300;
    spec.queries = 40;
    spec.calibration = 200;
    spec.dims = 32;
    const SyntheticCorpus c = make_synthetic_corpus(spec);
    PipelineConfig cfg;
    cfg.dtype = DType::int8;
    cfg.ratio = 0.5;
    const Pipeline p(cfg, &c.calibration, 32);
    CHECK(p.output_dims() == 16);
    const QuantizedMatrix q = p.compress(c.dataset.docs);
    CHECK(q.dims == 16);
    CHECK(q.dtype == DType::int8);
    CHECK(q.payload.size() == 300 * 16);
    const DatasetScore s = evaluate_dataset(c.dataset, p);
    CHECK(s.mean > 0.0);
    CHECK(s.mean <= 1.0);

    PipelineConfig rescore;
    rescore.dtype = DType::binary;
    rescore.oversample = 4;
    PipelineConfig plain = rescore;
    plain.oversample = 0;
    const double with = evaluate_dataset(c.dataset, Pipeline(rescore, &c.calibration, 32)).mean;
    const double without = evaluate_dataset(c.dataset, Pipeline(plain, &c.calibration, 32)).mean;
    CHECK(with >= without);
}

TEST_CASE("dataset errors keep their type and name the dataset") {
    DatasetData d = planted_fixture();
    d.queries = EmbeddingMatrix({"q0"}, 2, {1.f, 0.f});
    PipelineConfig cfg;
    CHECK_THROWS_WITH_AS(evaluate_dataset(d, Pipeline(cfg, nullptr, 3)), doctest::Contains("planted"),
                         ValidationError);
}

TEST_CASE("synthetic corpus is deterministic and unit-norm") {
    SyntheticSpec spec;
    spec.docs = 50;
    spec.queries = 10;
    spec.calibration = 20;
    spec.dims = 16;
    const SyntheticCorpus a = make_synthetic_corpus(spec);
    const SyntheticCorpus b = make_synthetic_corpus(spec);
    CHECK(a.dataset.docs == b.dataset.docs);
    CHECK(a.dataset.queries == b.dataset.queries);
    CHECK(a.calibration == b.calibration);
    for (std::size_t i = 0; i < 50; ++i) {
        double n = 0.0;
        for (float v : a.dataset.docs.row(i)) n += double(v) * v;
        CHECK(n == doctest::Approx(1.0).epsilon(1e-5));
    }
    CHECK(a.dataset.qrels.size() == 10);
    for (const auto& [q, rel] : a.dataset.qrels) CHECK(rel.size() == 1);
}
