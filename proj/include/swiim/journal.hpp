#pragma once

#include "swiim/codecs.hpp"
#include "swiim/content_hash.hpp"
#include "swiim/ops.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace swiim {

/// Decimal with exactly six fractional digits, stored as an integer count of
/// millionths. Journals hold these so the value an op executes with is
/// exactly the value written to the log.
class Fixed6 {
public:
    static constexpr std::int64_t kScale = 1'000'000;

    constexpr Fixed6() = default;
    static constexpr Fixed6 from_micros(std::int64_t micros) {
        Fixed6 f;
        f.micros_ = micros;
        return f;
    }
    /// Rounds to the nearest millionth (half away from zero). Non-finite or
    /// huge inputs raise ParamOutOfRange.
    static Fixed6 from_double(double value);
    /// Strict canonical syntax: -?(0|[1-9][0-9]*)\.[0-9]{6} (no "-0.000000")
    static std::optional<Fixed6> parse(std::string_view text);

    constexpr std::int64_t micros() const noexcept { return micros_; }
    double value() const noexcept { return static_cast<double>(micros_) / kScale; }
    std::string text() const;

    friend auto operator<=>(const Fixed6&, const Fixed6&) = default;

private:
    std::int64_t micros_ = 0;
};

enum class OpKind {
    Import,
    Crop,
    Rotate,
    Flip,
    BrightnessContrast,
    ColorBalance,
    Hue,
    Threshold,
    Equalize,
    Meld,
    Undo,
    Redo,
    Export,
};

std::string_view op_name(OpKind op);
std::optional<OpKind> op_from_name(std::string_view name);
/// True for the image-core operations (the ones that produce a new state).
bool is_edit(OpKind op);

struct ImportAction {
    std::string file;
    friend bool operator==(const ImportAction&, const ImportAction&) = default;
};
struct CropAction {
    PixelRect rect;
    friend bool operator==(const CropAction&, const CropAction&) = default;
};
struct RotateAction {
    int turns = 1;
    friend bool operator==(const RotateAction&, const RotateAction&) = default;
};
struct FlipAction {
    FlipAxis axis = FlipAxis::Horizontal;
    friend bool operator==(const FlipAction&, const FlipAction&) = default;
};
struct ToneAction {
    Fixed6 brightness;
    Fixed6 contrast;
    friend bool operator==(const ToneAction&, const ToneAction&) = default;
};
struct BalanceAction {
    Fixed6 r = Fixed6::from_micros(Fixed6::kScale);
    Fixed6 g = Fixed6::from_micros(Fixed6::kScale);
    Fixed6 b = Fixed6::from_micros(Fixed6::kScale);
    friend bool operator==(const BalanceAction&, const BalanceAction&) = default;
};
struct HueAction {
    Fixed6 degrees;
    friend bool operator==(const HueAction&, const HueAction&) = default;
};
struct ThresholdAction {
    Fixed6 level;
    friend bool operator==(const ThresholdAction&, const ThresholdAction&) = default;
};
struct EqualizeAction {
    friend bool operator==(const EqualizeAction&, const EqualizeAction&) = default;
};
/// The inserted image is named and pinned by its own content hash, so a
/// grouped figure is always explicit in the log.
struct MeldAction {
    std::string file;
    ContentHash insert_hash;
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t border_width = 0;
    Rgba border_color{0, 0, 0, 255};
    friend bool operator==(const MeldAction&, const MeldAction&) = default;
};
struct UndoAction {
    friend bool operator==(const UndoAction&, const UndoAction&) = default;
};
struct RedoAction {
    friend bool operator==(const RedoAction&, const RedoAction&) = default;
};
/// quality is 1..100 for jpg and 0 for the lossless formats.
struct ExportAction {
    std::string file;
    ImageFormat format = ImageFormat::Png;
    int quality = 0;
    friend bool operator==(const ExportAction&, const ExportAction&) = default;
};

using Action = std::variant<ImportAction, CropAction, RotateAction, FlipAction, ToneAction,
                            BalanceAction, HueAction, ThresholdAction, EqualizeAction, MeldAction,
                            UndoAction, RedoAction, ExportAction>;

OpKind kind_of(const Action& action);

// --- op parameter schema -------------------------------------------------------

enum class ValueKind { Integer, Decimal, String, Hash };

struct FieldSpec {
    std::string_view key;
    ValueKind kind;
};

using FieldValue = std::variant<std::int64_t, Fixed6, std::string, ContentHash>;
using FieldMap = std::map<std::string, FieldValue, std::less<>>;

/// Parameter keys of an op in canonical order, excluding the trailing `hash`.
std::span<const FieldSpec> schema(OpKind op);

/// Builds a typed action from named fields. Missing, unexpected, mistyped or
/// out-of-domain fields raise SchemaError naming the key; EXPORT quality
/// outside its range raises ParamOutOfRange.
Action build_action(OpKind op, const FieldMap& fields);

/// Inverse of build_action, in canonical key order.
std::vector<std::pair<std::string_view, FieldValue>> fields_of(const Action& action);

std::string color_text(Rgba c);
std::optional<Rgba> parse_color(std::string_view text);

// --- journal -------------------------------------------------------------------

struct SourceRef {
    std::string name;
    ContentHash hash;
    friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct JournalEntry {
    std::uint64_t seq = 0;
    Action action;
    ContentHash post_hash;

    OpKind op() const { return kind_of(action); }
    friend bool operator==(const JournalEntry&, const JournalEntry&) = default;
};

/// Ordered, append-only log bound to a source image. Values are immutable:
/// append() returns a new journal and never touches existing entries.
class Journal {
public:
    static constexpr int kVersion = 1;

    explicit Journal(SourceRef source);
    /// Entries are ordered by seq, then checked: seq contiguous from 1
    /// (SequenceError), first entry IMPORT (SequenceError), a single IMPORT
    /// (DuplicateImport), IMPORT hash equal to the source hash
    /// (InvariantViolation).
    Journal(SourceRef source, std::vector<JournalEntry> entries);

    const SourceRef& source() const noexcept { return source_; }
    std::span<const JournalEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const JournalEntry& back() const { return entries_.back(); }

    [[nodiscard]] Journal append(Action action, const ContentHash& post_hash) const&;
    [[nodiscard]] Journal append(Action action, const ContentHash& post_hash) &&;

    friend bool operator==(const Journal&, const Journal&) = default;

private:
    void push(Action action, const ContentHash& post_hash);

    SourceRef source_;
    std::vector<JournalEntry> entries_;
};

/// Canonical text: header line, one LF-terminated line per entry, fixed key
/// order, six-digit decimals, lowercase hex. Empty journals raise
/// InvariantViolation.
std::string serialize(const Journal& journal);

/// Canonical rendering of a single entry, without the trailing LF.
std::string serialize_entry(const JournalEntry& entry);

/// Errors carry line (and column for syntax errors) and, once the entry's
/// seq is known, the seq.
Journal parse_journal(std::string_view text);

std::string quote(std::string_view raw);

} // namespace swiim
