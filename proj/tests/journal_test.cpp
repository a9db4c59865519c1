#include "support/corpus.hpp"
#include "support/gen.hpp"

#include "swiim/error.hpp"
#include "swiim/journal.hpp"

#include <doctest.h>

using namespace swiim;
using swiim::testing::Rng;

namespace {

Error error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected swiim::Error");
    return Error(ErrorCode::IoError, "unreachable");
}

ContentHash h(char c) { return *ContentHash::from_hex(std::string(64, c)); }

Journal base_journal() { return Journal(SourceRef{"gel.png", h('a')}).append(ImportAction{"gel.png"}, h('a')); }

} // namespace

TEST_CASE("fixed-point decimals") {
    CHECK(Fixed6::from_double(0.2).micros() == 200000);
    CHECK(Fixed6::from_double(0.2).text() == "0.200000");
    CHECK(Fixed6::from_double(-0.2).text() == "-0.200000");
    CHECK(Fixed6::from_double(-0.0).text() == "0.000000");
    CHECK(Fixed6::from_double(1.0000004).micros() == 1000000);
    CHECK(Fixed6::from_double(1.0000006).micros() == 1000001);
    CHECK(Fixed6::from_micros(-5).text() == "-0.000005");
    CHECK(Fixed6::from_micros(123456789).text() == "123.456789");
    CHECK(Fixed6::from_micros(INT64_MIN).text() == "-9223372036854.775808");

    for (const char* good : {"0.000000", "1.500000", "-3.250000", "999999999999.999999"}) {
        const auto f = Fixed6::parse(good);
        REQUIRE(f);
        CHECK(f->text() == good);
    }
    for (const char* bad : {"", "1", "1.5", "1.5000000", "01.000000", "-0.000000", "+1.000000", ".500000",
                            "1.00000a", "1000000000000.000000", "--1.000000", "1e3", " 1.000000"})
        CHECK_FALSE(Fixed6::parse(bad));

    CHECK(error_of([] { Fixed6::from_double(NAN); }).code() == ErrorCode::ParamOutOfRange);
    CHECK(error_of([] { Fixed6::from_double(1e13); }).code() == ErrorCode::ParamOutOfRange);

    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        const auto f = Fixed6::from_micros(testing::uniform(rng, -999'999'999'999'999'999, 999'999'999'999'999'999));
        CHECK(Fixed6::parse(f.text()) == f);
        // The printed value re-quantizes to itself.
        if (std::abs(f.micros()) < (std::int64_t{1} << 52)) CHECK(Fixed6::from_double(f.value()) == f);
    }
}

TEST_CASE("colors and quoting") {
    CHECK(color_text({255, 0, 16, 128}) == "#ff001080");
    CHECK(parse_color("#ff001080") == Rgba{255, 0, 16, 128});
    CHECK_FALSE(parse_color("#FF001080"));
    CHECK_FALSE(parse_color("ff001080"));
    CHECK_FALSE(parse_color("#ff0010"));
    CHECK(quote("a\"b\\c") == "\"a\\\"b\\\\c\"");
    CHECK(quote(std::string("t\tn\n\x7f", 5)) == "\"t\\x09n\\x0a\\x7f\"");
    CHECK(quote("\xc3\xa9") == "\"\xc3\xa9\"");
}

TEST_CASE("serialization is canonical") {
    Journal j = base_journal();
    j = j.append(CropAction{{1, 2, 3, 4}}, h('b'));
    j = j.append(ToneAction{Fixed6::from_double(0.2), Fixed6::from_double(0)}, h('c'));
    j = j.append(FlipAction{FlipAxis::Vertical}, h('d'));
    j = j.append(MeldAction{"in set.png", h('e'), 5, 6, 1, {0, 0, 0, 255}}, h('f'));
    j = j.append(UndoAction{}, h('d'));
    j = j.append(ExportAction{"fig 1.jpg", ImageFormat::Jpeg, 95}, h('d'));

    const std::string a(64, 'a'), b(64, 'b'), c(64, 'c'), d(64, 'd'), e(64, 'e'), f(64, 'f');
    const std::string expected = "SWIIM/1 source=\"gel.png\" hash=" + a + "\n" +
                                 "1 IMPORT file=\"gel.png\" hash=" + a + "\n" +
                                 "2 CROP x=1 y=2 w=3 h=4 hash=" + b + "\n" +
                                 "3 BRIGHTNESS_CONTRAST b=0.200000 c=0.000000 hash=" + c + "\n" +
                                 "4 FLIP axis=\"vertical\" hash=" + d + "\n" +
                                 "5 MELD file=\"in set.png\" ihash=" + e +
                                 " x=5 y=6 bw=1 bcolor=\"#000000ff\" hash=" + f + "\n" +
                                 "6 UNDO hash=" + d + "\n" +
                                 "7 EXPORT file=\"fig 1.jpg\" format=\"jpg\" quality=95 hash=" + d + "\n";
    CHECK(serialize(j) == expected);
    CHECK(serialize_entry(j.entries()[2]) == "3 BRIGHTNESS_CONTRAST b=0.200000 c=0.000000 hash=" + c);
    CHECK(parse_journal(expected) == j);

    CHECK(error_of([] { serialize(Journal(SourceRef{"x", h('a')})); }).code() == ErrorCode::InvariantViolation);
}

TEST_CASE("parser leniency stays within one canonical form") {
    const std::string a(64, 'a'), b(64, 'b');
    const std::string loose = "SWIIM/1  hash=" + a + "   source=\"gel.png\"  # exported by hand\n"
                              "\n"
                              "# a comment\n"
                              "1   IMPORT file=\"gel.png\" hash=" + a + "\n"
                              "   \t\n"
                              "2 CROP h=4 w=3 y=2 x=1 hash=" + b + " # trailing note\n"
                              "3 EXPORT file=\"a#b.png\" format=\"png\" quality=0 hash=" + b; // no final LF
    const Journal j = parse_journal(loose);
    REQUIRE(j.size() == 3);
    CHECK(std::get<CropAction>(j.entries()[1].action).rect == PixelRect{1, 2, 3, 4});
    CHECK(std::get<ExportAction>(j.entries()[2].action).file == "a#b.png");
    const std::string canonical = serialize(j);
    CHECK(serialize(parse_journal(canonical)) == canonical);
    CHECK(canonical.find('#') == canonical.find("a#b") + 1);
}

TEST_CASE("escapes round trip through text") {
    const std::string weird = std::string("q\"b\\s\tn\nz\x01\x7f\xc3\xa9 #=", 17);
    Journal j = Journal(SourceRef{weird, h('a')}).append(ImportAction{weird}, h('a'));
    const auto text = serialize(j);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(parse_journal(text) == j);
}

TEST_CASE("parse and serialize are inverse on random journals") {
    Rng rng(32);
    for (int i = 0; i < 300; ++i) {
        const Journal j = testing::random_schema_journal(rng);
        const std::string text = serialize(j);
        const Journal back = parse_journal(text);
        CHECK(back == j);
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("malformed journals give located errors") {
    const auto corpus = testing::malformed_corpus();
    CHECK(corpus.size() >= 20);
    for (const auto& bad : corpus) {
        CAPTURE(bad.label);
        const Error e = error_of([&] { parse_journal(bad.text); });
        CHECK(e.code() == bad.code);
        REQUIRE(e.line());
        CHECK(*e.line() == bad.line);
        CHECK(std::string(e.what()).find("line " + std::to_string(bad.line)) != std::string::npos);
    }
}

TEST_CASE("syntax errors carry a column") {
    const std::string a(64, 'a');
    const Error e = error_of([&] {
        parse_journal("SWIIM/1 source=\"s\" hash=" + a + "\n1 IMPORT file=\"s\" hash=" + a + "\n2 CROP x=0y=0\n");
    });
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(e.line() == 3u);
    REQUIRE(e.column());
    CHECK(*e.column() == 10);
}

TEST_CASE("schema errors carry the seq") {
    const std::string a(64, 'a');
    const Error e = error_of([&] {
        parse_journal("SWIIM/1 source=\"s\" hash=" + a + "\n1 IMPORT file=\"s\" hash=" + a + "\n2 ROTATE hash=" + a +
                      "\n");
    });
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(e.seq() == 2u);
    CHECK(std::string(e.what()).find("turns") != std::string::npos);
}

TEST_CASE("random corruption never escapes as anything but swiim::Error") {
    Rng rng(33);
    static const std::string alphabet = "0123456789abcdefxyz =\"\\#\n\t.-ABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    for (int i = 0; i < 400; ++i) {
        std::string text = serialize(testing::random_schema_journal(rng, 6));
        const auto edits = testing::uniform(rng, 1, 3);
        for (int k = 0; k < edits; ++k) {
            const auto at = static_cast<std::size_t>(testing::uniform(rng, 0, text.size() - 1));
            switch (testing::uniform(rng, 0, 2)) {
            case 0: text.erase(at, 1); break;
            case 1: text.insert(at, 1, alphabet[static_cast<std::size_t>(testing::uniform(rng, 0, alphabet.size() - 1))]); break;
            default: text[at] = alphabet[static_cast<std::size_t>(testing::uniform(rng, 0, alphabet.size() - 1))];
            }
        }
        try {
            const Journal j = parse_journal(text);
            CHECK(parse_journal(serialize(j)) == j);
        } catch (const Error& e) {
            CHECK(e.line().has_value());
        }
    }
}

TEST_CASE("journal construction rules") {
    const Journal j = base_journal();
    CHECK(j.size() == 1);
    CHECK(error_of([&] { (void)j.append(ImportAction{"again"}, h('a')); }).code() == ErrorCode::DuplicateImport);
    CHECK(error_of([] { (void)Journal(SourceRef{"x", h('a')}).append(EqualizeAction{}, h('a')); }).code() ==
          ErrorCode::SequenceError);
    CHECK(error_of([] { (void)Journal(SourceRef{"x", h('a')}).append(ImportAction{"x"}, h('b')); }).code() ==
          ErrorCode::InvariantViolation);

    const Journal k = j.append(EqualizeAction{}, h('b'));
    CHECK(j.size() == 1);
    CHECK(k.size() == 2);
    CHECK(k.entries()[0] == j.entries()[0]);
    CHECK(k.back().seq == 2);

    // Entries given out of order are sorted by seq.
    std::vector<JournalEntry> shuffled{k.entries()[1], k.entries()[0]};
    CHECK(Journal(k.source(), shuffled) == k);
    shuffled[0].seq = 3;
    CHECK(error_of([&] { Journal(k.source(), shuffled); }).code() == ErrorCode::SequenceError);
}

TEST_CASE("schema and typed actions agree") {
    for (int op = 0; op <= static_cast<int>(OpKind::Export); ++op) {
        const auto kind = static_cast<OpKind>(op);
        CHECK(op_from_name(op_name(kind)) == kind);
    }
    CHECK_FALSE(op_from_name("crop"));
    CHECK(is_edit(OpKind::Meld));
    CHECK_FALSE(is_edit(OpKind::Export));
    CHECK_FALSE(is_edit(OpKind::Undo));

    Rng rng(34);
    for (int i = 0; i < 500; ++i) {
        const Action a = testing::random_schema_action(rng);
        FieldMap fields;
        const auto listed = fields_of(a);
        const auto spec = schema(kind_of(a));
        REQUIRE(listed.size() == spec.size());
        for (std::size_t k = 0; k < spec.size(); ++k) {
            CHECK(listed[k].first == spec[k].key);
            fields.emplace(std::string(listed[k].first), listed[k].second);
        }
        CHECK(build_action(kind_of(a), fields) == a);
    }
}
