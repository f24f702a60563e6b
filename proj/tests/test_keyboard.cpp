#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "support/stats.hpp"
#include "taptrace/keyboard.hpp"
#include "taptrace/rng.hpp"
#include "taptrace/text.hpp"

using namespace taptrace;

namespace {

const std::string kRoot = TAPTRACE_ROOT;

/// Replays a fixed list of draws; every call checks the requested range.
struct ScriptedDraws {
    std::vector<std::size_t> values;
    std::size_t pos = 0;

    std::size_t uniform_index(std::size_t lo, std::size_t hi) {
        REQUIRE(pos < values.size());
        const std::size_t v = values[pos++];
        REQUIRE(v >= lo);
        REQUIRE(v <= hi);
        return v;
    }
};

KeyboardLayout three_keys() {
    return parse_layout("keyWidth=10 keyHeight=10 horizontalGap=2 verticalGap=2\nA B C\n");
}

std::string label_string(const KeyboardLayout& layout) {
    std::string s;
    for (const std::string& label : layout.labels()) s += label;
    return s;
}

KeyboardLayout random_layout(Rng& rng) {
    std::string text = "keyWidth=" + std::to_string(rng.uniform_index(20, 80)) +
                       " keyHeight=" + std::to_string(rng.uniform_index(20, 80)) +
                       " horizontalGap=" + std::to_string(rng.uniform_index(0, 8)) +
                       " verticalGap=" + std::to_string(rng.uniform_index(0, 8)) + "\n";
    const std::size_t n_rows = rng.uniform_index(1, 4);
    int next_label = 0;
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::size_t n_cols = rng.uniform_index(1, 6);
        for (std::size_t c = 0; c < n_cols; ++c) {
            text += "k" + std::to_string(next_label++);
            text += c + 1 < n_cols ? ' ' : '\n';
        }
    }
    return parse_layout(text);
}

}  // namespace

TEST_SUITE("keyboard") {

TEST_CASE("shipped number pad parses with computed geometry") {
    const KeyboardLayout pad = load_layout(kRoot + "/layouts/numpad_3x4.layout");
    CHECK(pad.key_count() == 12);
    const std::vector<std::string> expect = {"1", "2", "3", "4", "5", "6",
                                             "7", "8", "9", "*", "0", "#"};
    CHECK(pad.labels() == expect);
    const Key& five = pad.key_at_slot(4);
    CHECK(five.label == "5");
    CHECK(five.x == 160.0);  // col 1: 150 + 10
    CHECK(five.y == 90.0);   // row 1: 80 + 10
    CHECK(five.w == 150.0);
    CHECK(five.h == 80.0);
    CHECK(pad.width() == 470.0);
    CHECK(pad.height() == 350.0);
}

TEST_CASE("single key layout sits at the origin") {
    const KeyboardLayout one = parse_layout(
        "keyWidth=30 keyHeight=20 horizontalGap=5 verticalGap=5\nQ\n");
    REQUIRE(one.key_count() == 1);
    CHECK(one.key_at_slot(0).x == 0.0);
    CHECK(one.key_at_slot(0).y == 0.0);
    CHECK(one.key_at_slot(0).keycode == 'Q');
}

TEST_CASE("duplicate labels are parse errors naming the label") {
    const std::string text =
        "keyWidth=10 keyHeight=10 horizontalGap=1 verticalGap=1\nA B\nC A\n";
    CHECK_THROWS_WITH_AS(parse_layout(text), doctest::Contains("'A'"),
                         std::runtime_error);
}

TEST_CASE("bad headers and rows are rejected with location") {
    CHECK_THROWS_AS(parse_layout("keyWidth=0 keyHeight=10 horizontalGap=1 verticalGap=1\nA\n"),
                    std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse_layout("keyWidth=10 keyHeight=10 horizontalGap=1 verticalGap=1\nrowKeyWidth=bogus A\n"),
        doctest::Contains("line 2"), std::runtime_error);
    CHECK_THROWS_AS(parse_layout(""), std::runtime_error);
}

TEST_CASE("per-row width override applies and round trips") {
    const std::string text =
        "keyWidth=10 keyHeight=10 horizontalGap=2 verticalGap=2\n"
        "A B\nrowKeyWidth=16 C D\n";
    const KeyboardLayout layout = parse_layout(text);
    CHECK(layout.key_at_slot(0).w == 10.0);
    CHECK(layout.key_at_slot(2).w == 16.0);
    CHECK(layout.key_at_slot(3).x == 18.0);  // 16 + gap 2
    const KeyboardLayout reparsed = parse_layout(layout_to_text(layout));
    CHECK(reparsed == layout);
}

TEST_CASE("hit_test resolves centers, gaps, and shared boundaries") {
    const KeyboardLayout pad = load_layout(kRoot + "/layouts/numpad_3x4.layout");
    const Key& five = pad.key_at_slot(4);
    const auto hit = hit_test(pad, five.center_x(), five.center_y());
    REQUIRE(hit.has_value());
    CHECK(hit->label == "5");
    CHECK_FALSE(hit_test(pad, 152.0, 40.0).has_value());  // horizontal gap
    CHECK_FALSE(hit_test(pad, -1.0, -1.0).has_value());

    // zero gaps: a shared edge belongs to the right/lower key
    const KeyboardLayout tight = parse_layout(
        "keyWidth=10 keyHeight=10 horizontalGap=0 verticalGap=0\nA B\nC D\n");
    CHECK(hit_test(tight, 10.0, 5.0)->label == "B");
    CHECK(hit_test(tight, 5.0, 10.0)->label == "C");
    CHECK(hit_test(tight, 10.0, 10.0)->label == "D");
}

TEST_CASE("identity draws leave the layout unchanged") {
    const KeyboardLayout base = three_keys();
    ScriptedDraws draws{{0, 1}};
    CHECK(shuffle_layout(base, draws) == base);
}

TEST_CASE("draw sequence (1,2) maps ABC to BCA") {
    const KeyboardLayout base = three_keys();
    ScriptedDraws draws{{1, 2}};
    CHECK(label_string(shuffle_layout(base, draws)) == "BCA");
}

TEST_CASE("exhaustive draws over 3 keys hit all 6 permutations once") {
    const KeyboardLayout base = three_keys();
    std::multiset<std::string> seen;
    for (std::size_t d0 = 0; d0 <= 2; ++d0) {
        for (std::size_t d1 = 1; d1 <= 2; ++d1) {
            ScriptedDraws draws{{d0, d1}};
            const KeyboardLayout shuffled = shuffle_layout(base, draws);
            CHECK(draws.pos == 2);  // consumes exactly n-1 draws
            seen.insert(label_string(shuffled));
        }
    }
    const std::multiset<std::string> expect = {"ABC", "ACB", "BAC",
                                               "BCA", "CAB", "CBA"};
    CHECK(seen == expect);
}

TEST_CASE("shuffle preserves geometry and the label multiset") {
    Rng rng(11);
    for (int round = 0; round < 100; ++round) {
        const KeyboardLayout base = random_layout(rng);
        const KeyboardLayout shuffled = shuffle_layout(base, rng);
        REQUIRE(shuffled.key_count() == base.key_count());
        std::multiset<std::string> base_labels, got_labels;
        std::multiset<int> base_codes, got_codes;
        for (std::size_t slot = 0; slot < base.key_count(); ++slot) {
            const Key& a = base.key_at_slot(slot);
            const Key& b = shuffled.key_at_slot(slot);
            CHECK(a.x == b.x);
            CHECK(a.y == b.y);
            CHECK(a.w == b.w);
            CHECK(a.h == b.h);
            base_labels.insert(a.label);
            got_labels.insert(b.label);
            base_codes.insert(a.keycode);
            got_codes.insert(b.keycode);
        }
        CHECK(base_labels == got_labels);
        CHECK(base_codes == got_codes);
    }
}

TEST_CASE("seeded shuffles are uniform over permutations (chi-square)") {
    const KeyboardLayout base = three_keys();
    std::map<std::string, int> counts;
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::for_stream(2024, static_cast<std::uint64_t>(i));
        counts[label_string(shuffle_layout(base, rng))]++;
    }
    REQUIRE(counts.size() == 6);
    std::vector<double> observed, expected;
    for (const auto& [perm, count] : counts) {
        observed.push_back(count);
        expected.push_back(n / 6.0);
    }
    const double stat = teststats::chi_square_statistic(observed, expected);
    CHECK(teststats::chi_square_p_value(stat, 5) > 0.01);
}

TEST_CASE("chi-square helper matches reference quantiles") {
    CHECK(teststats::chi_square_p_value(15.0863, 5) ==
          doctest::Approx(0.01).epsilon(1e-3));
    CHECK(teststats::chi_square_p_value(11.0705, 5) ==
          doctest::Approx(0.05).epsilon(1e-3));
    CHECK(teststats::chi_square_p_value(4.3515, 5) ==
          doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("consecutive popups draw from disjoint streams") {
    const KeyboardLayout pad = load_layout(kRoot + "/layouts/numpad_3x4.layout");
    Rng popup0a = Rng::for_stream(99, 0);
    Rng popup0b = Rng::for_stream(99, 0);
    Rng popup1 = Rng::for_stream(99, 1);
    const KeyboardLayout first = shuffle_layout(pad, popup0a);
    CHECK(shuffle_layout(pad, popup0b) == first);  // replayable
    CHECK(shuffle_layout(pad, popup1) != first);   // fresh layout next popup
}

TEST_CASE("proximity radius zero is the identity") {
    const KeyboardLayout pad = load_layout(kRoot + "/layouts/numpad_3x4.layout");
    Rng rng(5);
    CHECK(proximity_shuffle(pad, 0.0, rng) == pad);
}

TEST_CASE("proximity radius at the diagonal reproduces the plain shuffle") {
    const KeyboardLayout pad = load_layout(kRoot + "/layouts/numpad_3x4.layout");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng a(seed);
        Rng b(seed);
        CHECK(proximity_shuffle(pad, pad.diagonal(), a) == shuffle_layout(pad, b));
    }
}

TEST_CASE("proximity on a 1x3 row only reaches adjacent-swap permutations") {
    const KeyboardLayout row = three_keys();
    const double pitch = 12.0;  // key width 10 + gap 2
    std::set<std::string> reachable;
    // step 0 candidates: {0,1}; step 1 candidates: {1,2}
    for (std::size_t d0 = 0; d0 <= 1; ++d0) {
        for (std::size_t d1 = 0; d1 <= 1; ++d1) {
            ScriptedDraws draws{{d0, d1}};
            reachable.insert(label_string(proximity_shuffle(row, pitch, draws)));
        }
    }
    const std::set<std::string> expect = {"ABC", "ACB", "BAC", "BCA"};
    CHECK(reachable == expect);  // C never lands on slot 0, A and C never swap
}

TEST_CASE("substitution maps read off slot relabelings") {
    const KeyboardLayout base = three_keys();
    CHECK(substitution_map(base, base).mapping ==
          std::map<std::string, std::string>{{"A", "A"}, {"B", "B"}, {"C", "C"}});
    ScriptedDraws draws{{1, 2}};
    const KeyboardLayout shuffled = shuffle_layout(base, draws);  // BCA
    const SubstitutionMap map = substitution_map(base, shuffled);
    CHECK(map.at("A") == "B");
    CHECK(map.at("B") == "C");
    CHECK(map.at("C") == "A");
}

TEST_CASE("substitution maps compose through an intermediate layout") {
    const KeyboardLayout base = load_layout(kRoot + "/layouts/numpad_3x4.layout");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng r1 = Rng::for_stream(seed, 1);
        Rng r2 = Rng::for_stream(seed, 2);
        const KeyboardLayout s1 = shuffle_layout(base, r1);
        const KeyboardLayout s2 = shuffle_layout(s1, r2);
        const SubstitutionMap direct = substitution_map(base, s2);
        const SubstitutionMap composed =
            compose(substitution_map(base, s1), substitution_map(s1, s2));
        CHECK(composed == direct);
    }
}

TEST_CASE("substitution map rejects mismatched geometry") {
    const KeyboardLayout a = three_keys();
    const KeyboardLayout b = parse_layout(
        "keyWidth=11 keyHeight=10 horizontalGap=2 verticalGap=2\nA B C\n");
    CHECK_THROWS_AS(substitution_map(a, b), std::runtime_error);
}

}  // TEST_SUITE
