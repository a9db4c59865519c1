// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "support/corpus.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

#include "swiim/codecs.hpp"
#include "swiim/error.hpp"
#include "swiim/ops.hpp"
#include "swiim/replay.hpp"
#include "swiim/session.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace swiim;
using swiim::testing::Rng;

namespace {

// Pinned limits.
constexpr double kReplayBudgetSeconds = 30.0;
// Largest per-channel JPEG q95 error, measured over 1000 random opaque 64x64
// rasters with this encoder (observed range 16..28).
constexpr int kJpegQ95Tolerance = 28;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects the first failure message of a criterion.
struct Check {
    std::string failure;
    void expect(bool ok, const std::string& what) {
        if (!ok && failure.empty()) failure = what;
    }
    explicit operator bool() const { return failure.empty(); }
};

int failures = 0;

void criterion(const std::string& name, const std::function<std::string(Check&)>& body) {
    Check check;
    std::string detail;
    try {
        detail = body(check);
    } catch (const std::exception& e) {
        check.expect(false, std::string("unexpected exception: ") + e.what());
    }
    if (check) {
        std::cout << "PASS " << name << ": " << detail << std::endl;
    } else {
        ++failures;
        std::cout << "FAIL " << name << ": " << check.failure << std::endl;
    }
}

std::optional<ErrorCode> error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

Raster opaque(Raster r) {
    auto px = r.bytes();
    for (std::size_t i = 3; i < px.size(); i += 4) px[i] = 255;
    return r;
}

// Random session with occasional runs of consecutive undos and redos.
Session bursty_session(Rng& rng, std::uint32_t max_side, std::int64_t steps) {
    Session s = Session::open(testing::random_raster(rng, max_side), "src.png");
    for (std::int64_t i = 0; i < steps; ++i) {
        if (testing::chance(rng, 0.15)) {
            const auto undos = testing::uniform(rng, 1, 5);
            for (std::int64_t k = 0; k < undos && s.history().can_undo(); ++k) s.undo();
            const auto redos = testing::uniform(rng, 0, undos);
            for (std::int64_t k = 0; k < redos && s.history().can_redo(); ++k) s.redo();
        } else {
            testing::random_session_step(rng, s, 0.25);
        }
    }
    return s;
}

// All w x h rasters over `palette`.
std::vector<Raster> all_rasters(std::uint32_t w, std::uint32_t h, const std::vector<Rgba>& palette) {
    std::vector<Raster> out;
    const std::size_t n = std::size_t{w} * h;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= palette.size();
    for (std::size_t code = 0; code < total; ++code) {
        Raster r(w, h);
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i, c /= palette.size())
            r.set(static_cast<std::uint32_t>(i % w), static_cast<std::uint32_t>(i / w), palette[c % palette.size()]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string replace_hash_digit(const std::string& text, std::size_t seq, std::size_t digit, Rng& rng) {
    std::istringstream in(text);
    std::string line, out;
    const std::string prefix = std::to_string(seq) + " ";
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) {
            char& c = line[line.size() - 64 + digit];
            static const std::string hex = "0123456789abcdef";
            char next;
            do next = hex[static_cast<std::size_t>(testing::uniform(rng, 0, 15))];
            while (next == c);
            c = next;
        }
        out += line + "\n";
    }
    return out;
}

} // namespace

int main() {
    criterion("replay determinism", [](Check& check) {
        Rng rng(1001);
        double replay_seconds = 0;
        for (int i = 0; i < 200; ++i) {
            Session s = Session::open(testing::random_raster(rng, 64, 64), "src.png");
            const auto ops = testing::uniform(rng, 5, 15);
            while (static_cast<std::int64_t>(s.journal().size()) - 1 < ops) testing::random_session_step(rng, s, 0.2);
            const Journal j = parse_journal(serialize(s.journal()));
            const auto t0 = Clock::now();
            const ReplayResult a = replay(j, s.source(), s.assets());
            const ReplayResult b = replay(j, s.source(), s.assets());
            replay_seconds += seconds_since(t0);
            check.expect(a.report.passed() && b.report.passed(), "replay reported a mismatch on journal " + std::to_string(i));
            check.expect(a.raster == b.raster, "two replays differ on journal " + std::to_string(i));
            check.expect(a.raster == s.current(), "replay differs from the live session on journal " + std::to_string(i));
        }
        check.expect(replay_seconds < kReplayBudgetSeconds, "replays took " + std::to_string(replay_seconds) + " s");
        return "200 journals of 5-15 ops on 64x64, replayed twice in " + std::to_string(replay_seconds) + " s";
    });

    criterion("master invariant", [](Check& check) {
        Rng rng(1002);
        std::size_t steps_checked = 0;
        for (int run = 0; run < 1000; ++run) {
            Session s = Session::open(testing::random_raster(rng, 16), "src.png");
            const auto steps = testing::uniform(rng, 1, 20);
            for (std::int64_t i = 0; i < steps; ++i) {
                testing::random_session_step(rng, s, 0.3);
                const ReplayResult r = replay(s.journal(), s.source(), s.assets());
                check.expect(r.report.passed() && content_hash(r.raster) == s.current_hash(),
                             "violation in sequence " + std::to_string(run) + " step " + std::to_string(i));
                ++steps_checked;
            }
        }
        return "1000 sequences, " + std::to_string(steps_checked) + " steps, 0 violations";
    });

    criterion("op algebra", [](Check& check) {
        Rng rng(1003);
        const std::vector<std::pair<std::string, std::function<bool(const Raster&)>>> laws{
            {"rotate^4 = id", [](const Raster& r) { return rotate(rotate(rotate(rotate(r, 1), 1), 1), 1) == r; }},
            {"rotate(2)^2 = id", [](const Raster& r) { return rotate(rotate(r, 2), 2) == r; }},
            {"flip(h)^2 = id", [](const Raster& r) { return flip(flip(r, FlipAxis::Horizontal), FlipAxis::Horizontal) == r; }},
            {"flip(v)^2 = id", [](const Raster& r) { return flip(flip(r, FlipAxis::Vertical), FlipAxis::Vertical) == r; }},
            {"flip(h) flip(v) = rotate(2)",
             [](const Raster& r) { return flip(flip(r, FlipAxis::Horizontal), FlipAxis::Vertical) == rotate(r, 2); }},
            {"crop(full) = id", [](const Raster& r) { return crop(r, {0, 0, r.width(), r.height()}) == r; }},
            {"bc(0,0) = id", [](const Raster& r) { return brightness_contrast(r, {0, 0}) == r; }},
            {"gains(1,1,1) = id", [](const Raster& r) { return color_balance(r, {1, 1, 1}) == r; }},
            {"hue(0) = id", [](const Raster& r) { return hue_rotate(r, {0}) == r; }},
            {"hue(360) = id", [](const Raster& r) { return hue_rotate(r, {360}) == r; }},
        };
        for (const auto& [name, law] : laws) {
            for (int i = 0; i < 100; ++i) {
                const Raster r = testing::random_raster(rng, 24);
                check.expect(law(r), name + " fails on raster " + std::to_string(i));
            }
        }
        return std::to_string(laws.size()) + " laws x 100 random rasters, bit-exact";
    });

    criterion("oracle equivalence", [](Check& check) {
        const std::vector<Rgba> palette{{0, 0, 0, 0}, {255, 0, 128, 255}, {7, 200, 33, 90}};
        std::vector<Raster> inserts;
        for (std::uint32_t iw = 1; iw <= 2; ++iw)
            for (std::uint32_t ih = 1; ih <= 2; ++ih)
                for (auto& r : all_rasters(iw, ih, palette)) inserts.push_back(std::move(r));
        std::size_t cases = 0;
        for (const auto& [w, h] : {std::pair<std::uint32_t, std::uint32_t>{2, 3}, {3, 2}}) {
            for (const Raster& img : all_rasters(w, h, palette)) {
                for (int t = 1; t <= 3; ++t, ++cases)
                    check.expect(rotate(img, t) == oracle::rotate(img, t), "rotate " + std::to_string(t));
                check.expect(flip(img, FlipAxis::Horizontal) == oracle::flip(img, true), "flip h");
                check.expect(flip(img, FlipAxis::Vertical) == oracle::flip(img, false), "flip v");
                cases += 2;
                for (std::uint32_t x = 0; x <= w; ++x)
                    for (std::uint32_t y = 0; y <= h; ++y)
                        for (std::uint32_t cw = 1; cw <= w + 1; ++cw)
                            for (std::uint32_t ch = 1; ch <= h + 1; ++ch, ++cases) {
                                const auto want = oracle::crop(img, x, y, cw, ch);
                                if (want) {
                                    check.expect(crop(img, {x, y, cw, ch}) == *want, "crop");
                                } else {
                                    check.expect(error_of([&] { crop(img, {x, y, cw, ch}); }) == ErrorCode::OutOfBounds,
                                                 "out-of-bounds crop accepted");
                                }
                            }
                for (const Raster& insert : inserts)
                    for (std::uint32_t x = 0; x <= w; ++x)
                        for (std::uint32_t y = 0; y <= h; ++y, ++cases) {
                            const auto want = oracle::meld(img, insert, x, y, 0, palette[1]);
                            const MeldSpec spec{x, y, 0, palette[1]};
                            if (want) {
                                check.expect(meld(img, insert, spec) == *want, "meld");
                            } else {
                                check.expect(error_of([&] { meld(img, insert, spec); }) == ErrorCode::OutOfBounds,
                                             "out-of-bounds meld accepted");
                            }
                        }
            }
        }
        return std::to_string(cases) + " exhaustive cases over 2x3 and 3x2 rasters, 3-colour palette";
    });

    criterion("worked scalars", [](Check& check) {
        const Raster tone = brightness_contrast(Raster(1, 1, Rgba{100, 100, 100, 255}), {0.2, 0.0});
        check.expect(tone.at(0, 0) == Rgba{151, 151, 151, 255}, "brightness_contrast(100; 0.2, 0) != 151");

        Raster four(4, 1);
        const std::array<std::uint8_t, 4> in{10, 10, 20, 30};
        for (std::uint32_t i = 0; i < 4; ++i) four.set(i, 0, Rgba{in[i], in[i], in[i], 255});
        const Raster eq = equalize_histogram(four);
        const std::array<std::uint8_t, 4> want{0, 0, 170, 255};
        for (std::uint32_t i = 0; i < 4; ++i)
            check.expect(eq.at(i, 0) == Rgba{want[i], want[i], want[i], 255}, "equalize {10,10,20,30}");

        const Raster hue = hue_rotate(Raster(1, 1, Rgba{255, 0, 0, 255}), {120});
        check.expect(hue.at(0, 0) == Rgba{0, 255, 0, 255}, "hue_rotate(red, 120) != green");
        return "151, {0,0,170,255}, red->green exact";
    });

    criterion("parser", [](Check& check) {
        Rng rng(1006);
        for (int i = 0; i < 500; ++i) {
            const Journal j = testing::random_schema_journal(rng);
            const std::string text = serialize(j);
            const Journal back = parse_journal(text);
            check.expect(back == j, "parse(serialize(j)) != j for journal " + std::to_string(i));
            check.expect(serialize(back) == text, "canonical text is not a fixed point for journal " + std::to_string(i));
        }
        const auto corpus = testing::malformed_corpus();
        check.expect(corpus.size() >= 20, "corpus has fewer than 20 cases");
        for (const auto& bad : corpus) {
            try {
                parse_journal(bad.text);
                check.expect(false, "accepted: " + bad.label);
            } catch (const Error& e) {
                check.expect(e.code() == bad.code, "wrong code for: " + bad.label);
                check.expect(e.line() == bad.line, "wrong line for: " + bad.label);
            }
        }
        return "500 round trips, fixed point, " + std::to_string(corpus.size()) + " malformed inputs located";
    });

    criterion("codecs", [](Check& check) {
        Rng rng(1007);
        for (int i = 0; i < 100; ++i) {
            const Raster r = testing::random_raster(rng, 48);
            for (auto f : {ImageFormat::Png, ImageFormat::Bmp, ImageFormat::Tiff})
                check.expect(import_image(export_image(r, f)).raster == r,
                             std::string(to_string(f)) + " round trip differs on raster " + std::to_string(i));
            check.expect(content_hash(import_image(export_image(r, ImageFormat::Png)).raster) ==
                             content_hash(import_image(export_image(r, ImageFormat::Bmp)).raster),
                         "png and bmp hashes differ on raster " + std::to_string(i));
        }
        Rng jpeg_rng(2024);
        int worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Raster r = opaque(testing::random_raster(jpeg_rng, 64, 64));
            const Raster back = import_image(export_image(r, ImageFormat::Jpeg, 95)).raster;
            for (std::size_t k = 0; k < r.bytes().size(); ++k)
                worst = std::max(worst, std::abs(int(r.bytes()[k]) - int(back.bytes()[k])));
        }
        check.expect(worst <= kJpegQ95Tolerance, "jpeg q95 max delta " + std::to_string(worst));
        return "100 lossless round trips, png/bmp hash equal, jpeg q95 max delta " + std::to_string(worst) +
               " <= " + std::to_string(kJpegQ95Tolerance);
    });

    criterion("tamper detection", [](Check& check) {
        Rng rng(1008);
        int hash_mutations = 0, pixel_mutations = 0;
        for (int i = 0; i < 100; ++i) {
            const Session s = bursty_session(rng, 12, testing::uniform(rng, 2, 12));
            const std::string text = serialize(s.journal());
            const std::string tag = "mutation " + std::to_string(i);
            if (testing::chance(rng, 0.5)) {
                ++hash_mutations;
                const auto seq = static_cast<std::size_t>(testing::uniform(rng, 1, s.journal().size()));
                const auto digit = static_cast<std::size_t>(testing::uniform(rng, 0, 63));
                const std::string bad = replace_hash_digit(text, seq, digit, rng);
                try {
                    const VerifyResult v = verify(parse_journal(bad), s.source(), s.current(), s.assets());
                    check.expect(v.verdict == Verdict::Fail, tag + ": tampered hash passed");
                    check.expect(v.report.first_mismatch() == seq, tag + ": wrong first-mismatch seq");
                } catch (const Error& e) {
                    // The IMPORT hash must equal the header's source hash, so the
                    // journal is rejected before replay.
                    check.expect(seq == 1 && e.code() == ErrorCode::InvariantViolation && e.seq() == 1u,
                                 tag + ": unexpected error " + e.what());
                }
            } else {
                ++pixel_mutations;
                Raster claimed = s.current();
                auto px = claimed.bytes();
                const auto at = static_cast<std::size_t>(testing::uniform(rng, 0, px.size() - 1));
                px[at] = static_cast<std::uint8_t>(px[at] ^ testing::uniform(rng, 1, 255));
                const VerifyResult v = verify(s.journal(), s.source(), claimed, s.assets());
                check.expect(v.verdict == Verdict::Fail, tag + ": tampered pixel passed");
                check.expect(!v.report.first_mismatch(), tag + ": journal blamed for a pixel change");
                check.expect(v.diff.differing_pixel_count == 1, tag + ": differing pixel count");
            }
        }
        return std::to_string(hash_mutations) + " hash-digit and " + std::to_string(pixel_mutations) +
               " pixel-byte mutations, all caught at the right seq";
    });

    criterion("normalize", [](Check& check) {
        Rng rng(1009);
        std::size_t removed = 0;
        for (int i = 0; i < 200; ++i) {
            const Session s = bursty_session(rng, 16, testing::uniform(rng, 5, 40));
            const std::string tag = "session " + std::to_string(i);
            const Journal n = normalize(s.journal(), s.source(), s.assets());
            for (const auto& e : n.entries())
                check.expect(e.op() != OpKind::Undo && e.op() != OpKind::Redo, tag + ": UNDO/REDO left");
            const ReplayResult r = replay(n, s.source(), s.assets());
            check.expect(r.report.passed(), tag + ": normalized journal does not replay");
            check.expect(content_hash(r.raster) == s.current_hash(), tag + ": final hash changed");
            check.expect(normalize(n, s.source(), s.assets()) == n, tag + ": not idempotent");
            removed += s.journal().size() - n.size();
        }
        return "200 sessions, idempotent, UNDO/REDO-free, final hash preserved (" + std::to_string(removed) +
               " entries dropped)";
    });

    return failures;
}
