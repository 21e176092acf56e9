#include "dca/engine.hpp"
#include "dca/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dca;

namespace {

PopulationConfig single_cell(double threshold) {
    PopulationConfig p;
    p.population_size = 1;
    p.threshold_lo = threshold;
    p.threshold_hi = threshold;
    return p;
}

std::vector<AntigenEvent> antigen(std::initializer_list<const char*> types) {
    std::vector<AntigenEvent> out;
    std::uint64_t seq = 0;
    for (auto t : types) out.push_back({0, t, "send", seq++});
    return out;
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("presets match the weight table column by column") {
    const auto names = weight_preset_names();
    REQUIRE(names == std::vector<std::string>{"WS1", "WS2", "WS3", "WS4", "WS5"});
    for (int k = 0; k < 5; ++k) {
        const auto w = weight_preset(names[k]);
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) CHECK(w.w[j][i] == oracle::weight(k, j, i));
    }
}

TEST_CASE("table1 is WS3") {
    const auto t1 = weight_preset("table1");
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) CHECK(t1.w[j][i] == oracle::kDefaultWeights[i][j]);
    CHECK(t1.w == weight_preset("WS3").w);
    CHECK_THROWS_AS(weight_preset("WS6"), ConfigError);
}

TEST_CASE("weight matrix file") {
    const auto path = std::filesystem::temp_directory_path() / "dca_weights_test.txt";
    {
        std::ofstream out(path);
        out << "# custom\ncsm = 1 2 3\nsemi = 0 0 1\nmat = 4 5 -6\n";
    }
    const auto w = resolve_weights(path.string());
    CHECK(w.w[2][2] == -6.0);
    CHECK(w.w[0][1] == 2.0);
    {
        std::ofstream out(path);
        out << "csm = 1 2\n";
    }
    CHECK_THROWS_AS(resolve_weights(path.string()), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(resolve_weights("no/such/file"), ConfigError);
}

TEST_CASE("fuse_signals examples") {
    const auto w = weight_preset("WS3");
    CHECK(fuse_signals({0, 0, 0, 0}, w) == OutputSignals{0, 0, 0});
    CHECK(fuse_signals({0, 100, 0, 0}, w) == OutputSignals{400, 0, 800});
    CHECK(fuse_signals({0, 0, 0, 10}, w) == OutputSignals{30, 10, -60});
}

TEST_CASE("single cell reaches its threshold on the third sample") {
    Population pop(single_cell(1000));
    const auto w = weight_preset("WS3");
    const SignalSample s{0, 100, 0, 0};
    CHECK(pop.step(s, antigen({"7"}), w).empty());
    CHECK(pop.cells()[0].cum_csm == 400);
    CHECK(pop.step(s, {}, w).empty());
    const auto out = pop.step(s, {}, w);
    REQUIRE(out.size() == 1);
    CHECK(out[0].antigen_type == "7");
    CHECK(out[0].context == 1);
    CHECK(pop.size() == 1);
    CHECK(pop.cells()[0].cum_csm == 0);
    CHECK(pop.migrations() == 1);
}

TEST_CASE("equal semi and mat present in context 1") {
    DendriticCell c;
    c.cum_semi = 5;
    c.cum_mat = 5;
    CHECK(c.context() == 1);
    c.cum_mat = 4.999;
    CHECK(c.context() == 0);
}

TEST_CASE("full stores drop antigen") {
    PopulationConfig p = single_cell(1e9);
    p.store_capacity = 2;
    Population pop(p);
    pop.step({}, antigen({"a", "b", "c"}), weight_preset("WS3"));
    CHECK(pop.sampled() == 3);
    CHECK(pop.dropped() == 1);
    const auto out = pop.migrate_all();
    CHECK(out.size() == 2);
}

TEST_CASE("per-step quota limits intake") {
    PopulationConfig p = single_cell(1e9);
    p.antigen_per_cell_per_step = 1;
    Population pop(p);
    const auto w = weight_preset("WS3");
    pop.step({}, antigen({"a", "b"}), w);
    pop.step({}, antigen({"c"}), w);
    CHECK(pop.dropped() == 1);
    CHECK(pop.cells()[0].antigen_store.size() == 2);
}

TEST_CASE("invalid population config") {
    PopulationConfig p;
    p.population_size = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.threshold_lo = 900;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("run on empty dataset") {
    const auto r = run_engine(Dataset{}, {}, {}, weight_preset("WS3"));
    CHECK(r.presentations.empty());
    CHECK(r.tally.empty());
}

TEST_CASE("engine is deterministic for a fixed seed and sensitive to it") {
    std::vector<EventRecord> rs;
    for (std::int64_t t = 0; t < 60000; t += 37) {
        EventRecord e;
        e.ts = t;
        e.process_id = std::to_string(t % 3);
        e.process_name = "p";
        e.call_name = (t % 2) ? "send" : "recv";
        e.category = CallCategory::communication;
        e.direction = natural_direction(e.call_name);
        e.seq = static_cast<std::uint64_t>(t);
        rs.push_back(e);
    }
    const auto ds = dataset_from_records(rs);
    PopulationConfig p;
    p.rng_seed = 11;
    const auto a = run_engine(ds, {}, p, weight_preset("WS3"));
    const auto b = run_engine(ds, {}, p, weight_preset("WS3"));
    CHECK(a.presentations == b.presentations);
    p.rng_seed = 12;
    const auto c = run_engine(ds, {}, p, weight_preset("WS3"));
    CHECK_FALSE(a.presentations == c.presentations);
    std::uint64_t presented = 0;
    for (const auto& [k, e] : a.tally) presented += e.total;
    CHECK(presented == a.sampled - a.dropped);
}

} // TEST_SUITE
