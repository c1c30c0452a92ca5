#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "aecrit/corpus.hpp"

using namespace aecrit;

TEST_CASE("typewriter indexing walks passes and blocks") {
    // pass 1: indices 1..2, pass 2: 3..6, pass 3: 7..14
    REQUIRE(typewriter_block(1).pass == 1);
    REQUIRE(typewriter_block(2).pass == 1);
    REQUIRE(typewriter_block(2).block == 2);
    REQUIRE(typewriter_block(3).pass == 2);
    REQUIRE(typewriter_block(3).block == 1);
    REQUIRE(typewriter_block(6).pass == 2);
    REQUIRE(typewriter_block(7).pass == 3);
    REQUIRE(typewriter_block(14).pass == 3);
    REQUIRE(typewriter_block(14).block == 8);
    REQUIRE(typewriter_block(15).pass == 4);

    // pass 3, block 5 covers [4/8, 5/8)
    auto blk = typewriter_block(11);
    REQUIRE(blk.pass == 3);
    REQUIRE(blk.block == 5);
    REQUIRE(blk.lo == 0.5);
    REQUIRE(blk.hi == 0.625);

    REQUIRE_THROWS_AS(typewriter_block(0), ToolkitError);
}

TEST_CASE("each typewriter pass tiles the unit interval") {
    for (long pass = 1; pass <= 6; ++pass) {
        long first = (2L << (pass - 1)) - 2 + 1;
        long count = 1L << pass;
        double edge = 0.0;
        for (long i = 0; i < count; ++i) {
            auto blk = typewriter_block(first + i);
            REQUIRE(blk.pass == pass);
            REQUIRE(blk.lo == edge);
            edge = blk.hi;
        }
        REQUIRE(edge == 1.0);
    }
}

TEST_CASE("full-pass caps close the sweep after n's pass") {
    REQUIRE(typewriter_full_pass_cap(4) == 14);    // n in pass 2, cap at end of pass 3
    REQUIRE(typewriter_full_pass_cap(7) == 30);    // pass 3 -> end of pass 4
    REQUIRE(typewriter_full_pass_cap(64) == 254);  // pass 6 -> end of pass 7
    for (long n : {2L, 5L, 23L, 100L}) {
        long cap = typewriter_full_pass_cap(n);
        REQUIRE(typewriter_block(cap).pass == typewriter_block(n).pass + 1);
        REQUIRE(typewriter_block(cap + 1).pass == typewriter_block(n).pass + 2);
    }
}

TEST_CASE("the corpus carries every advertised entry") {
    auto corpus = builtin_corpus();
    std::set<std::string> names;
    for (const auto& e : corpus) names.insert(e.name);
    for (const char* required : {"power", "typewriter", "recip", "oscillate", "shrink-spike",
                                 "random-decay", "random-walk-2d", "cosine", "trigpoly-8",
                                 "square-wave", "sawtooth"})
        REQUIRE(names.count(required) == 1);
    REQUIRE(find_corpus_entry(corpus, "no-such-entry") == nullptr);
}

TEST_CASE("ground truths are internally consistent") {
    // a.e. convergence implies convergence in measure on probability spaces
    for (const auto& e : builtin_corpus()) {
        if (e.ground_truth.ae_converges.value_or(false))
            REQUIRE(e.ground_truth.in_measure.value_or(false));
    }
    auto corpus = builtin_corpus();
    REQUIRE(*find_corpus_entry(corpus, "power")->ground_truth.ae_converges);
    REQUIRE_FALSE(*find_corpus_entry(corpus, "oscillate")->ground_truth.in_measure);
    REQUIRE_FALSE(*find_corpus_entry(corpus, "typewriter")->ground_truth.ae_converges);
    REQUIRE(*find_corpus_entry(corpus, "typewriter")->ground_truth.in_measure);
}

TEST_CASE("generators are deterministic under a fixed seed") {
    auto corpus = builtin_corpus();
    for (const char* name : {"random-decay", "random-walk-2d"}) {
        const auto* e = find_corpus_entry(corpus, name);
        auto a = bind_corpus_sequence(*e, 777);
        auto b = bind_corpus_sequence(*e, 777);
        auto c = bind_corpus_sequence(*e, 778);
        std::vector<double> va(2), vb(2), vc(2);
        double point = 17.0;
        bool any_difference = false;
        for (long n : {1L, 5L, 64L}) {
            a.eval(n, std::span<const double>(&point, 1), std::span<double>(va));
            b.eval(n, std::span<const double>(&point, 1), std::span<double>(vb));
            c.eval(n, std::span<const double>(&point, 1), std::span<double>(vc));
            REQUIRE(va == vb);
            if (va != vc) any_difference = true;
        }
        REQUIRE(any_difference);
    }
}

TEST_CASE("random-walk prefixes are consistent under out-of-order access") {
    auto corpus = builtin_corpus();
    const auto* e = find_corpus_entry(corpus, "random-walk-2d");
    auto seq = bind_corpus_sequence(*e, 99);
    double point = 3.0;
    std::vector<double> fresh(2), resumed(2), step(2);
    // ascending access (uses the resumable cache) ...
    for (long n = 1; n <= 40; ++n)
        seq.eval(n, std::span<const double>(&point, 1), std::span<double>(resumed));
    // ... must match a cold evaluation at the endpoint
    double other = 11.0;
    seq.eval(7, std::span<const double>(&other, 1), std::span<double>(step));  // invalidate
    seq.eval(40, std::span<const double>(&point, 1), std::span<double>(fresh));
    REQUIRE(fresh == resumed);
}

TEST_CASE("periodic entries evaluate through the 2-pi reduction") {
    auto corpus = builtin_corpus();
    const auto* sw = find_corpus_entry(corpus, "square-wave");
    REQUIRE(periodic_value(*sw->periodic, 0.5) == 1.0);
    REQUIRE(periodic_value(*sw->periodic, 0.5 + kTwoPi) == 1.0);
    REQUIRE(periodic_value(*sw->periodic, 4.0) == -1.0);
    const auto* saw = find_corpus_entry(corpus, "sawtooth");
    REQUIRE(periodic_value(*saw->periodic, 1.0) ==
            Catch::Approx(periodic_value(*saw->periodic, 1.0 - kTwoPi)).margin(1e-12));
}
