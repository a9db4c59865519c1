#include "swiim/journal.hpp"

#include "swiim/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace swiim {

// --- Fixed6 --------------------------------------------------------------------

Fixed6 Fixed6::from_double(double value) {
    // 9e12 keeps value * 1e6 well inside int64 and exactly representable steps.
    if (!std::isfinite(value) || std::fabs(value) > 9e12) {
        throw Error(ErrorCode::ParamOutOfRange, "decimal value " + std::to_string(value) +
                                                    " cannot be journaled");
    }
    return from_micros(std::llround(value * static_cast<double>(kScale)));
}

std::optional<Fixed6> Fixed6::parse(std::string_view text) {
    std::size_t i = 0;
    const bool negative = !text.empty() && text[0] == '-';
    if (negative) ++i;

    const std::size_t int_begin = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    const std::size_t int_len = i - int_begin;
    if (int_len == 0 || int_len > 12) return std::nullopt;
    if (int_len > 1 && text[int_begin] == '0') return std::nullopt;
    if (i >= text.size() || text[i] != '.') return std::nullopt;
    ++i;
    if (text.size() - i != 6) return std::nullopt;

    std::int64_t micros = 0;
    for (std::size_t k = int_begin; k < text.size(); ++k) {
        if (k == int_begin + int_len) continue; // the '.'
        const char c = text[k];
        if (c < '0' || c > '9') return std::nullopt;
        micros = micros * 10 + (c - '0');
    }
    if (negative && micros == 0) return std::nullopt; // only one spelling of zero
    return from_micros(negative ? -micros : micros);
}

std::string Fixed6::text() const {
    const bool negative = micros_ < 0;
    const std::uint64_t magnitude =
        negative ? std::uint64_t{0} - static_cast<std::uint64_t>(micros_)
                 : static_cast<std::uint64_t>(micros_);
    std::string frac = std::to_string(magnitude % kScale);
    frac.insert(0, 6 - frac.size(), '0');
    return (negative ? "-" : "") + std::to_string(magnitude / kScale) + "." + frac;
}

// --- op names ------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 13> kOpNames{{
    {OpKind::Import, "IMPORT"},
    {OpKind::Crop, "CROP"},
    {OpKind::Rotate, "ROTATE"},
    {OpKind::Flip, "FLIP"},
    {OpKind::BrightnessContrast, "BRIGHTNESS_CONTRAST"},
    {OpKind::ColorBalance, "COLOR_BALANCE"},
    {OpKind::Hue, "HUE"},
    {OpKind::Threshold, "THRESHOLD"},
    {OpKind::Equalize, "EQUALIZE"},
    {OpKind::Meld, "MELD"},
    {OpKind::Undo, "UNDO"},
    {OpKind::Redo, "REDO"},
    {OpKind::Export, "EXPORT"},
}};

using enum ValueKind;

constexpr FieldSpec kImportFields[] = {{"file", String}};
constexpr FieldSpec kCropFields[] = {{"x", Integer}, {"y", Integer}, {"w", Integer}, {"h", Integer}};
constexpr FieldSpec kRotateFields[] = {{"turns", Integer}};
constexpr FieldSpec kFlipFields[] = {{"axis", String}};
constexpr FieldSpec kToneFields[] = {{"b", Decimal}, {"c", Decimal}};
constexpr FieldSpec kBalanceFields[] = {{"r", Decimal}, {"g", Decimal}, {"b", Decimal}};
constexpr FieldSpec kHueFields[] = {{"deg", Decimal}};
constexpr FieldSpec kThresholdFields[] = {{"t", Decimal}};
constexpr FieldSpec kMeldFields[] = {{"file", String}, {"ihash", Hash},    {"x", Integer},
                                     {"y", Integer},   {"bw", Integer},    {"bcolor", String}};
constexpr FieldSpec kExportFields[] = {{"file", String}, {"format", String}, {"quality", Integer}};

std::string_view kind_name(ValueKind kind) {
    switch (kind) {
    case Integer: return "an integer";
    case Decimal: return "a decimal with 6 fractional digits";
    case String: return "a quoted string";
    case Hash: return "a 64-digit lowercase hex hash";
    }
    return "?";
}

ValueKind value_kind(const FieldValue& v) {
    switch (v.index()) {
    case 0: return Integer;
    case 1: return Decimal;
    case 2: return String;
    default: return Hash;
    }
}

class FieldReader {
public:
    FieldReader(OpKind op, const FieldMap& fields) : op_(op), fields_(fields) {
        const auto spec = schema(op);
        for (const auto& [key, value] : fields) {
            const auto it = std::find_if(spec.begin(), spec.end(),
                                         [&](const FieldSpec& f) { return f.key == key; });
            if (it == spec.end()) fail("unexpected key '" + key + "'");
            if (value_kind(value) != it->kind)
                fail("key '" + key + "' expects " + std::string(kind_name(it->kind)));
        }
        for (const auto& f : spec) {
            if (fields.find(f.key) == fields.end())
                fail("missing key '" + std::string(f.key) + "'");
        }
    }

    std::int64_t integer(std::string_view key, std::int64_t lo, std::int64_t hi) const {
        const auto v = std::get<std::int64_t>(fields_.find(key)->second);
        if (v < lo || v > hi)
            fail("key '" + std::string(key) + "' = " + std::to_string(v) + " out of range");
        return v;
    }
    std::uint32_t u32(std::string_view key) const {
        return static_cast<std::uint32_t>(integer(key, 0, std::numeric_limits<std::uint32_t>::max()));
    }
    Fixed6 decimal(std::string_view key) const { return std::get<Fixed6>(fields_.find(key)->second); }
    const std::string& text(std::string_view key) const {
        return std::get<std::string>(fields_.find(key)->second);
    }
    const ContentHash& hash(std::string_view key) const {
        return std::get<ContentHash>(fields_.find(key)->second);
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::SchemaError, std::string(op_name(op_)) + ": " + what);
    }

private:
    OpKind op_;
    const FieldMap& fields_;
};

} // namespace

std::string_view op_name(OpKind op) {
    for (const auto& [kind, name] : kOpNames)
        if (kind == op) return name;
    return "?";
}

std::optional<OpKind> op_from_name(std::string_view name) {
    for (const auto& [kind, n] : kOpNames)
        if (n == name) return kind;
    return std::nullopt;
}

bool is_edit(OpKind op) {
    switch (op) {
    case OpKind::Import:
    case OpKind::Undo:
    case OpKind::Redo:
    case OpKind::Export:
        return false;
    default:
        return true;
    }
}

static_assert(std::variant_size_v<Action> == kOpNames.size(),
              "Action alternatives must follow OpKind order");

OpKind kind_of(const Action& action) {
    return static_cast<OpKind>(action.index());
}

std::span<const FieldSpec> schema(OpKind op) {
    switch (op) {
    case OpKind::Import: return kImportFields;
    case OpKind::Crop: return kCropFields;
    case OpKind::Rotate: return kRotateFields;
    case OpKind::Flip: return kFlipFields;
    case OpKind::BrightnessContrast: return kToneFields;
    case OpKind::ColorBalance: return kBalanceFields;
    case OpKind::Hue: return kHueFields;
    case OpKind::Threshold: return kThresholdFields;
    case OpKind::Meld: return kMeldFields;
    case OpKind::Export: return kExportFields;
    case OpKind::Equalize:
    case OpKind::Undo:
    case OpKind::Redo:
        return {};
    }
    return {};
}

std::string color_text(Rgba c) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "#";
    for (std::uint8_t v : {c.r, c.g, c.b, c.a}) {
        out += kDigits[v >> 4];
        out += kDigits[v & 0x0f];
    }
    return out;
}

std::optional<Rgba> parse_color(std::string_view text) {
    if (text.size() != 9 || text[0] != '#') return std::nullopt;
    std::array<std::uint8_t, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
        int byte = 0;
        for (std::size_t k = 0; k < 2; ++k) {
            const char c = text[1 + 2 * i + k];
            int n;
            if (c >= '0' && c <= '9') n = c - '0';
            else if (c >= 'a' && c <= 'f') n = c - 'a' + 10;
            else return std::nullopt;
            byte = byte * 16 + n;
        }
        v[i] = static_cast<std::uint8_t>(byte);
    }
    return Rgba{v[0], v[1], v[2], v[3]};
}

Action build_action(OpKind op, const FieldMap& fields) {
    const FieldReader in(op, fields);
    switch (op) {
    case OpKind::Import: return ImportAction{in.text("file")};
    case OpKind::Crop:
        return CropAction{PixelRect{in.u32("x"), in.u32("y"), in.u32("w"), in.u32("h")}};
    case OpKind::Rotate:
        return RotateAction{static_cast<int>(in.integer("turns", std::numeric_limits<int>::min(),
                                                        std::numeric_limits<int>::max()))};
    case OpKind::Flip: {
        const auto& axis = in.text("axis");
        if (axis == "horizontal") return FlipAction{FlipAxis::Horizontal};
        if (axis == "vertical") return FlipAction{FlipAxis::Vertical};
        in.fail("axis must be \"horizontal\" or \"vertical\", got \"" + axis + "\"");
    }
    case OpKind::BrightnessContrast: return ToneAction{in.decimal("b"), in.decimal("c")};
    case OpKind::ColorBalance:
        return BalanceAction{in.decimal("r"), in.decimal("g"), in.decimal("b")};
    case OpKind::Hue: return HueAction{in.decimal("deg")};
    case OpKind::Threshold: return ThresholdAction{in.decimal("t")};
    case OpKind::Equalize: return EqualizeAction{};
    case OpKind::Meld: {
        const auto color = parse_color(in.text("bcolor"));
        if (!color) in.fail("bcolor must look like \"#rrggbbaa\"");
        return MeldAction{in.text("file"), in.hash("ihash"), in.u32("x"), in.u32("y"),
                          in.u32("bw"), *color};
    }
    case OpKind::Undo: return UndoAction{};
    case OpKind::Redo: return RedoAction{};
    case OpKind::Export: {
        const auto format = format_from_name(in.text("format"));
        if (!format) in.fail("format must be one of \"png\", \"jpg\", \"bmp\", \"tiff\"");
        const auto quality = in.integer("quality", std::numeric_limits<int>::min(),
                                        std::numeric_limits<int>::max());
        const bool ok = *format == ImageFormat::Jpeg ? (quality >= 1 && quality <= 100) : quality == 0;
        if (!ok) {
            throw Error(ErrorCode::ParamOutOfRange,
                        "EXPORT: quality " + std::to_string(quality) + " invalid for " +
                            std::string(to_string(*format)) + " (jpg: 1..100, others: 0)");
        }
        return ExportAction{in.text("file"), *format, static_cast<int>(quality)};
    }
    }
    throw Error(ErrorCode::SchemaError, "unknown op");
}

std::vector<std::pair<std::string_view, FieldValue>> fields_of(const Action& action) {
    using Fields = std::vector<std::pair<std::string_view, FieldValue>>;
    auto i = [](std::uint32_t v) { return FieldValue{static_cast<std::int64_t>(v)}; };
    return std::visit(
        [&](const auto& a) -> Fields {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, ImportAction>) {
                return {{"file", a.file}};
            } else if constexpr (std::is_same_v<T, CropAction>) {
                return {{"x", i(a.rect.x)}, {"y", i(a.rect.y)}, {"w", i(a.rect.w)}, {"h", i(a.rect.h)}};
            } else if constexpr (std::is_same_v<T, RotateAction>) {
                return {{"turns", std::int64_t{a.turns}}};
            } else if constexpr (std::is_same_v<T, FlipAction>) {
                return {{"axis", std::string(a.axis == FlipAxis::Horizontal ? "horizontal" : "vertical")}};
            } else if constexpr (std::is_same_v<T, ToneAction>) {
                return {{"b", a.brightness}, {"c", a.contrast}};
            } else if constexpr (std::is_same_v<T, BalanceAction>) {
                return {{"r", a.r}, {"g", a.g}, {"b", a.b}};
            } else if constexpr (std::is_same_v<T, HueAction>) {
                return {{"deg", a.degrees}};
            } else if constexpr (std::is_same_v<T, ThresholdAction>) {
                return {{"t", a.level}};
            } else if constexpr (std::is_same_v<T, MeldAction>) {
                return {{"file", a.file},   {"ihash", a.insert_hash},
                        {"x", i(a.x)},      {"y", i(a.y)},
                        {"bw", i(a.border_width)}, {"bcolor", color_text(a.border_color)}};
            } else if constexpr (std::is_same_v<T, ExportAction>) {
                return {{"file", a.file},
                        {"format", std::string(to_string(a.format))},
                        {"quality", std::int64_t{a.quality}}};
            } else {
                return {};
            }
        },
        action);
}

// --- Journal -------------------------------------------------------------------

Journal::Journal(SourceRef source) : source_(std::move(source)) {}

Journal::Journal(SourceRef source, std::vector<JournalEntry> entries)
    : source_(std::move(source)), entries_(std::move(entries)) {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const JournalEntry& a, const JournalEntry& b) { return a.seq < b.seq; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.seq != i + 1) {
            throw Error(ErrorCode::SequenceError, "expected seq " + std::to_string(i + 1) +
                                                      ", found " + std::to_string(e.seq))
                .with_seq(e.seq);
        }
        if (i == 0 && e.op() != OpKind::Import) {
            throw Error(ErrorCode::SequenceError, "first entry must be IMPORT, found " +
                                                      std::string(op_name(e.op())))
                .with_seq(e.seq);
        }
        if (i > 0 && e.op() == OpKind::Import) {
            throw Error(ErrorCode::DuplicateImport, "journal may contain only one IMPORT")
                .with_seq(e.seq);
        }
        if (i == 0 && e.post_hash != source_.hash) {
            throw Error(ErrorCode::InvariantViolation, "IMPORT hash does not match the header source hash")
                .with_seq(e.seq);
        }
    }
}

void Journal::push(Action action, const ContentHash& post_hash) {
    const OpKind op = kind_of(action);
    const std::uint64_t seq = entries_.size() + 1;
    if (op == OpKind::Import && !entries_.empty()) {
        throw Error(ErrorCode::DuplicateImport, "journal already has an IMPORT entry").with_seq(seq);
    }
    if (op != OpKind::Import && entries_.empty()) {
        throw Error(ErrorCode::SequenceError,
                    std::string(op_name(op)) + " appended before IMPORT").with_seq(seq);
    }
    if (op == OpKind::Import && post_hash != source_.hash) {
        throw Error(ErrorCode::InvariantViolation, "IMPORT hash does not match the header source hash")
            .with_seq(seq);
    }
    entries_.push_back({seq, std::move(action), post_hash});
}

Journal Journal::append(Action action, const ContentHash& post_hash) const& {
    Journal next = *this;
    next.push(std::move(action), post_hash);
    return next;
}

Journal Journal::append(Action action, const ContentHash& post_hash) && {
    push(std::move(action), post_hash);
    return std::move(*this);
}

} // namespace swiim
