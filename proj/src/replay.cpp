#include "swiim/replay.hpp"

#include "swiim/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace swiim {

namespace {

using Clock = std::chrono::steady_clock;

void check_source(const Journal& journal, const Raster& source) {
    const ContentHash actual = content_hash(source);
    if (actual != journal.source().hash) {
        throw Error(ErrorCode::SourceMismatch, "source image hashes to " + actual.hex() +
                                                   " but the journal expects " +
                                                   journal.source().hash.hex());
    }
}

// Executes one entry against the history. Errors get the entry's seq.
void execute(const JournalEntry& entry, EditHistory& history, const AssetStore& assets) {
    try {
        switch (entry.op()) {
        case OpKind::Import:
        case OpKind::Export:
            break;
        case OpKind::Undo:
            history.undo();
            break;
        case OpKind::Redo:
            history.redo();
            break;
        default:
            history.push(apply_edit(entry.action, history.current(), assets));
            break;
        }
    } catch (Error& e) {
        if (!e.seq()) e.with_seq(entry.seq);
        throw;
    }
}

} // namespace

bool ReplayReport::passed() const {
    return std::all_of(records.begin(), records.end(), [](const EntryRecord& r) { return r.match; });
}

std::optional<std::uint64_t> ReplayReport::first_mismatch() const {
    for (const auto& r : records)
        if (!r.match) return r.seq;
    return std::nullopt;
}

ReplayResult replay(const Journal& journal, const Raster& source, const AssetStore& assets) {
    check_source(journal, source);
    EditHistory history(source);
    ReplayReport report;
    report.records.reserve(journal.size());
    for (const auto& entry : journal.entries()) {
        const auto start = Clock::now();
        execute(entry, history, assets);
        const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
        report.records.push_back({entry.seq, entry.op(), history.current_hash(), entry.post_hash,
                                  history.current_hash() == entry.post_hash, elapsed});
    }
    return {history.current(), std::move(report)};
}

Raster step(const Journal& journal, const Raster& source, std::size_t n, const AssetStore& assets) {
    check_source(journal, source);
    if (n > journal.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "step " + std::to_string(n) + " beyond " +
                                                    std::to_string(journal.size()) + " entries");
    }
    EditHistory history(source);
    for (const auto& entry : journal.entries().first(n)) execute(entry, history, assets);
    return history.current();
}

VerifyResult verify(const Journal& journal, const Raster& source, const Raster& claimed,
                    const AssetStore& assets) {
    ReplayResult run = replay(journal, source, assets);
    VerifyResult out;
    out.replayed_hash = content_hash(run.raster);
    out.claimed_hash = content_hash(claimed);
    out.diff = diff(run.raster, claimed);
    out.verdict = run.report.passed() && out.replayed_hash == out.claimed_hash ? Verdict::Pass
                                                                                 : Verdict::Fail;
    out.report = std::move(run.report);
    return out;
}

Journal normalize(const Journal& journal, const Raster& source, const AssetStore& assets) {
    // Each frame is one surviving state: the entry that produced it (IMPORT
    // for the base) and the EXPORTs taken while it was current.
    struct Frame {
        Action action;
        std::vector<Action> exports;
    };
    std::vector<Frame> undo_stack;
    std::vector<Frame> redo_stack;

    for (const auto& entry : journal.entries()) {
        try {
            switch (entry.op()) {
            case OpKind::Import:
                undo_stack.push_back({entry.action, {}});
                break;
            case OpKind::Export:
                undo_stack.back().exports.push_back(entry.action);
                break;
            case OpKind::Undo:
                if (undo_stack.size() <= 1) throw Error(ErrorCode::NothingToUndo, "no applied operation to undo");
                redo_stack.push_back(std::move(undo_stack.back()));
                undo_stack.pop_back();
                break;
            case OpKind::Redo:
                if (redo_stack.empty()) throw Error(ErrorCode::NothingToRedo, "no undone operation to redo");
                undo_stack.push_back(std::move(redo_stack.back()));
                redo_stack.pop_back();
                break;
            default:
                redo_stack.clear();
                undo_stack.push_back({entry.action, {}});
                break;
            }
        } catch (Error& e) {
            e.with_seq(entry.seq);
            throw;
        }
    }

    check_source(journal, source);
    EditHistory history(source);
    Journal out(journal.source());
    for (const auto& frame : undo_stack) {
        if (kind_of(frame.action) != OpKind::Import) {
            try {
                history.push(apply_edit(frame.action, history.current(), assets));
            } catch (Error& e) {
                e.with_seq(out.size() + 1);
                throw;
            }
        }
        out = std::move(out).append(frame.action, history.current_hash());
        for (const auto& exp : frame.exports) out = std::move(out).append(exp, history.current_hash());
    }
    return out;
}

DiffReport diff(const Raster& a, const Raster& b) {
    DiffReport d;
    if (a.width() != b.width() || a.height() != b.height()) {
        d.identical = false;
        d.dims_match = false;
        return d;
    }
    const auto pa = a.bytes();
    const auto pb = b.bytes();
    for (std::size_t i = 0; i < pa.size(); i += Raster::kChannels) {
        int worst = 0;
        for (std::size_t c = 0; c < Raster::kChannels; ++c)
            worst = std::max(worst, std::abs(int{pa[i + c]} - int{pb[i + c]}));
        if (worst > 0) {
            ++d.differing_pixel_count;
            d.max_channel_delta = std::max(d.max_channel_delta, worst);
        }
    }
    d.identical = d.differing_pixel_count == 0;
    return d;
}

std::string render(const ReplayReport& report) {
    std::string out;
    for (const auto& r : report.records) {
        out += std::to_string(r.seq) + " " + std::string(op_name(r.op)) +
               " computed=" + r.computed.short_hex() + " recorded=" + r.recorded.short_hex() +
               (r.match ? " MATCH\n" : " MISMATCH\n");
    }
    return out;
}

std::string render(const DiffReport& d) {
    if (!d.dims_match) return "dimensions differ";
    if (d.identical) return "identical";
    return "differing_pixels=" + std::to_string(d.differing_pixel_count) +
           " max_delta=" + std::to_string(d.max_channel_delta);
}

std::string_view to_string(Verdict v) { return v == Verdict::Pass ? "PASS" : "FAIL"; }

} // namespace swiim
