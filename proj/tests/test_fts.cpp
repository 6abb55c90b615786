#include <doctest.h>

#include <set>

#include "awaresynth/fts.hpp"

using namespace aware;

TEST_CASE("car model has ten states and nineteen edges") {
    Fts fts = build_car_fts();
    CHECK(fts.state_count() == 10);
    CHECK(fts.edges().size() == 19);
    CHECK(fts.init_states() == std::vector<std::size_t>{fts.state_id("M4")});
    CHECK(fts.validate().empty());
}

TEST_CASE("edge families of the car model") {
    Fts fts = build_car_fts();
    auto succ = [&](const char* name) {
        std::set<std::pair<std::string, std::string>> out;
        for (auto [q, o] : fts.successors(fts.state_id(name)))
            out.insert({fts.state_name(q), o});
        return out;
    };

    CHECK(succ("M2") == std::set<std::pair<std::string, std::string>>{
                            {"M1", "move"}, {"S1", "slowDown"}});
    CHECK(succ("S0") == std::set<std::pair<std::string, std::string>>{
                            {"S0", "halt"}, {"M4", "move"}});
    CHECK(succ("M0") == std::set<std::pair<std::string, std::string>>{{"M4", "move"}});
    CHECK(succ("S3") == std::set<std::pair<std::string, std::string>>{
                            {"S2", "slowDown"}, {"M2", "move"}});

    // O(M1 -> S0) = slowDown: the last-chance deceleration into the sign cell.
    bool found = false;
    for (const auto& e : fts.edges())
        if (fts.state_name(e.from) == "M1" && fts.state_name(e.to) == "S0") {
            CHECK(e.output == "slowDown");
            found = true;
        }
    CHECK(found);
}

TEST_CASE("deceleration chain reachable from M4") {
    Fts fts = build_car_fts();
    std::set<std::size_t> reach{fts.state_id("M4")};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& e : fts.edges())
            if (reach.count(e.from) && !reach.count(e.to)) { reach.insert(e.to); grew = true; }
    }
    // M4 -> S3 -> S2 -> S1 -> S0 plus all moving cells. S4 is source-only:
    // deceleration always begins with the M_i -> S_{i-1} step, and every
    // lap re-entry lands on M4, so "stopping at full distance" never arises.
    for (const char* name : {"M4", "M3", "M2", "M1", "M0", "S3", "S2", "S1", "S0"})
        CHECK(reach.count(fts.state_id(name)));
    CHECK(reach.size() == fts.state_count() - 1);
    CHECK(!reach.count(fts.state_id("S4")));
}

TEST_CASE("location decreases by one mod 5 except the hard-stop loop") {
    Fts fts = build_car_fts();
    for (const auto& e : fts.edges()) {
        int from = car_location(fts, e.from);
        int to = car_location(fts, e.to);
        if (e.from == e.to) {
            CHECK(e.output == "halt");
            CHECK(from == 0);
        } else {
            CHECK(to == (from + kCarCells - 1) % kCarCells);
        }
    }
}

TEST_CASE("stop-in-d feasibility from every moving state") {
    // From M_d, d >= 1: d slowDown outputs then halt, ending in S0.
    Fts fts = build_car_fts();
    for (int d = 1; d < kCarCells; ++d) {
        std::size_t q = fts.state_id("M" + std::to_string(d));
        int slowdowns = 0;
        while (car_location(fts, q) > 0 || car_moving(fts, q)) {
            bool stepped = false;
            for (auto [next, out] : fts.successors(q))
                if (out == "slowDown") {
                    q = next;
                    ++slowdowns;
                    stepped = true;
                    break;
                }
            REQUIRE(stepped);
        }
        CHECK(slowdowns == d);
        CHECK(fts.state_name(q) == "S0");
        bool can_halt = false;
        for (auto [next, out] : fts.successors(q)) can_halt = can_halt || out == "halt";
        CHECK(can_halt);
    }
    // From M0 no halt is possible before the lap wraps.
    for (auto [next, out] : fts.successors(fts.state_id("M0"))) {
        CHECK(out == "move");
        CHECK(fts.state_name(next) == "M4");
    }
}

TEST_CASE("validate reports blocking states and missing outputs") {
    Fts bad;
    std::size_t a = bad.add_state("a");
    std::size_t b = bad.add_state("b");
    bad.mark_init(a);
    bad.add_edge(a, b, "");

    auto violations = bad.validate();
    bool saw_blocking = false, saw_output = false;
    for (const auto& v : violations) {
        if (v.kind == FtsViolation::NonBlocking && v.detail == "b") saw_blocking = true;
        if (v.kind == FtsViolation::OutputTotality) saw_output = true;
    }
    CHECK(saw_blocking);
    CHECK(saw_output);

    Fts loop;
    std::size_t s = loop.add_state("s");
    loop.mark_init(s);
    loop.add_edge(s, s, "stay");
    CHECK(loop.validate().empty());
    CHECK(loop.successors(s) ==
          std::vector<std::pair<std::size_t, std::string>>{{s, "stay"}});
    CHECK_THROWS_AS(loop.successors(3), UnknownState);
}

TEST_CASE("serialization round trips the car model") {
    Fts fts = build_car_fts();
    std::string text = dump_fts(fts);
    Fts back = parse_fts(text);
    CHECK(back.state_count() == fts.state_count());
    CHECK(back.edges().size() == fts.edges().size());
    CHECK(dump_fts(back) == text);
}
