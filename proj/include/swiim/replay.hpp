#pragma once

#include "swiim/content_hash.hpp"
#include "swiim/edit_history.hpp"
#include "swiim/journal.hpp"
#include "swiim/raster.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace swiim {

struct EntryRecord {
    std::uint64_t seq = 0;
    OpKind op = OpKind::Import;
    ContentHash computed;
    ContentHash recorded;
    bool match = false;
    std::chrono::microseconds elapsed{0};
};

struct ReplayReport {
    std::vector<EntryRecord> records;

    bool passed() const;
    /// seq of the first MISMATCH record, if any.
    std::optional<std::uint64_t> first_mismatch() const;
};

struct DiffReport {
    bool identical = true;
    bool dims_match = true;
    std::uint64_t differing_pixel_count = 0;
    int max_channel_delta = 0;
};

struct ReplayResult {
    Raster raster;
    ReplayReport report;
};

enum class Verdict { Pass, Fail };

struct VerifyResult {
    Verdict verdict = Verdict::Fail;
    ReplayReport report;
    DiffReport diff;
    ContentHash replayed_hash;
    ContentHash claimed_hash;
};

/// Re-executes every entry on `source` and compares each computed state hash
/// with the recorded one. Mismatches do not stop the run. SourceMismatch when
/// the source does not hash to the journal header; execution errors carry
/// the failing entry's seq.
ReplayResult replay(const Journal& journal, const Raster& source, const AssetStore& assets = {});

/// State after exactly the first n entries (n = 0 and n = 1 both give the
/// source). IndexOutOfRange when n exceeds the entry count.
Raster step(const Journal& journal, const Raster& source, std::size_t n,
            const AssetStore& assets = {});

/// PASS iff every entry hash matches and the replayed result hashes equal to
/// `claimed`.
VerifyResult verify(const Journal& journal, const Raster& source, const Raster& claimed,
                    const AssetStore& assets = {});

/// Rewrites the journal without UNDO/REDO: the surviving edits along the
/// final undo path, renumbered, with hashes recomputed by execution. EXPORT
/// entries stay attached to the state they exported.
Journal normalize(const Journal& journal, const Raster& source, const AssetStore& assets = {});

DiffReport diff(const Raster& a, const Raster& b);

/// One line per entry: `seq OP computed=xxxxxxxx recorded=xxxxxxxx MATCH|MISMATCH`.
std::string render(const ReplayReport& report);
std::string render(const DiffReport& diff);

std::string_view to_string(Verdict v);

} // namespace swiim
