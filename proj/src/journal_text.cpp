#include "swiim/error.hpp"
#include "swiim/journal.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace swiim {

namespace {

constexpr std::string_view kMagic = "SWIIM/";

std::string value_text(const FieldValue& v) {
    switch (v.index()) {
    case 0: return std::to_string(std::get<std::int64_t>(v));
    case 1: return std::get<Fixed6>(v).text();
    case 2: return quote(std::get<std::string>(v));
    default: return std::get<ContentHash>(v).hex();
    }
}

bool is_space(char c) { return c == ' ' || c == '\t'; }

/// Lexical form of an unquoted or quoted value, before the schema types it.
struct Token {
    std::string text;
    bool quoted = false;
    std::size_t column = 0;
};

/// Walks one line. Columns are 1-based byte offsets.
class LineCursor {
public:
    LineCursor(std::string_view line, std::size_t number) : line_(line), number_(number) {}

    bool at_end() const { return pos_ >= line_.size(); }
    std::size_t column() const { return pos_ + 1; }
    char peek() const { return at_end() ? '\0' : line_[pos_]; }

    /// Skips whitespace; a '#' after whitespace (or at line start) ends the line.
    void skip_space() {
        while (!at_end() && is_space(line_[pos_])) ++pos_;
        if (!at_end() && line_[pos_] == '#') pos_ = line_.size();
    }

    void expect_separator() {
        if (at_end()) return;
        if (!is_space(line_[pos_])) fail("expected a space");
        skip_space();
    }

    std::string_view take_while(auto pred) {
        const std::size_t start = pos_;
        while (!at_end() && pred(line_[pos_])) ++pos_;
        return line_.substr(start, pos_ - start);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string key() {
        const std::size_t col = column();
        auto k = take_while([](char c) {
            return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        });
        if (k.empty() || !(k[0] >= 'a' && k[0] <= 'z')) fail_at(col, "expected a parameter key");
        return std::string(k);
    }

    Token value() {
        Token t;
        t.column = column();
        if (peek() == '"') {
            t.quoted = true;
            t.text = quoted();
        } else {
            t.text = std::string(take_while([](char c) { return !is_space(c); }));
            if (t.text.empty()) fail("expected a value");
        }
        if (!at_end() && !is_space(peek())) fail("unexpected character after value");
        return t;
    }

    [[noreturn]] void fail(const std::string& what) const { fail_at(column(), what); }
    [[noreturn]] void fail_at(std::size_t col, const std::string& what) const {
        throw Error(ErrorCode::SyntaxError, what).at(number_, col);
    }

private:
    std::string quoted() {
        ++pos_; // opening quote
        std::string out;
        while (true) {
            if (at_end()) fail("unterminated string");
            const char c = line_[pos_];
            if (c == '"') {
                ++pos_;
                return out;
            }
            if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) fail("control character in string");
            if (c != '\\') {
                out += c;
                ++pos_;
                continue;
            }
            if (pos_ + 1 >= line_.size()) fail("unterminated escape");
            const char e = line_[pos_ + 1];
            if (e == '\\' || e == '"') {
                out += e;
                pos_ += 2;
            } else if (e == 'x' && pos_ + 3 < line_.size()) {
                int v = 0;
                const auto* first = line_.data() + pos_ + 2;
                auto [ptr, ec] = std::from_chars(first, first + 2, v, 16);
                if (ec != std::errc() || ptr != first + 2) fail("bad \\x escape");
                out += static_cast<char>(v);
                pos_ += 4;
            } else {
                fail("unknown escape");
            }
        }
    }

    std::string_view line_;
    std::size_t number_;
    std::size_t pos_ = 0;
};

bool is_hex64(std::string_view s) {
    return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

bool is_integer(std::string_view s) {
    if (!s.empty() && s[0] == '-') s.remove_prefix(1);
    if (s.empty() || (s.size() > 1 && s[0] == '0')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Rejects tokens that match none of the value productions.
void check_lexical(const LineCursor& cur, const Token& t) {
    if (t.quoted) return;
    if (is_hex64(t.text) || is_integer(t.text) || Fixed6::parse(t.text)) return;
    cur.fail_at(t.column, "malformed value '" + t.text + "'");
}

[[noreturn]] void schema_fail(std::size_t line, std::size_t col, std::uint64_t seq,
                              std::string_view op, const std::string& what) {
    Error e(ErrorCode::SchemaError, std::string(op) + ": " + what);
    e.at(line, col).with_seq(seq);
    throw e;
}

FieldValue typed(const Token& t, ValueKind kind, std::size_t line, std::uint64_t seq,
                 std::string_view op, std::string_view key) {
    auto mismatch = [&](std::string_view expected) -> FieldValue {
        schema_fail(line, t.column, seq, op,
                    "key '" + std::string(key) + "' expects " + std::string(expected));
    };
    switch (kind) {
    case ValueKind::String:
        if (!t.quoted) return mismatch("a quoted string");
        return t.text;
    case ValueKind::Hash:
        if (t.quoted || !is_hex64(t.text)) return mismatch("a 64-digit lowercase hex hash");
        return *ContentHash::from_hex(t.text);
    case ValueKind::Decimal: {
        auto d = t.quoted ? std::nullopt : Fixed6::parse(t.text);
        if (!d) return mismatch("a decimal with 6 fractional digits");
        return *d;
    }
    case ValueKind::Integer: {
        if (t.quoted || !is_integer(t.text)) return mismatch("an integer");
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size())
            schema_fail(line, t.column, seq, op, "key '" + std::string(key) + "' out of range");
        return v;
    }
    }
    return mismatch("?");
}

SourceRef parse_header(std::string_view line) {
    LineCursor cur(line, 1);
    if (line.substr(0, kMagic.size()) != kMagic) cur.fail("missing SWIIM header");
    const auto version_text = line.substr(kMagic.size(), line.find(' ') - kMagic.size());
    if (version_text != std::to_string(Journal::kVersion)) {
        throw Error(ErrorCode::SyntaxError,
                    "unsupported journal version '" + std::string(version_text) + "'")
            .at(1, kMagic.size() + 1);
    }
    cur.take_while([](char c) { return !is_space(c); });
    cur.expect_separator();

    std::optional<std::string> name;
    std::optional<ContentHash> hash;
    while (!cur.at_end()) {
        const std::size_t col = cur.column();
        const std::string key = cur.key();
        cur.expect('=');
        const Token t = cur.value();
        if (key == "source" && !name) {
            if (!t.quoted) cur.fail_at(t.column, "source must be a quoted string");
            name = t.text;
        } else if (key == "hash" && !hash) {
            hash = t.quoted ? std::nullopt : ContentHash::from_hex(t.text);
            if (!hash) cur.fail_at(t.column, "hash must be 64 lowercase hex digits");
        } else {
            cur.fail_at(col, "unexpected header key '" + key + "'");
        }
        cur.expect_separator();
    }
    if (!name) cur.fail("header lacks source=");
    if (!hash) cur.fail("header lacks hash=");
    return {*name, *hash};
}

JournalEntry parse_entry(std::string_view line, std::size_t number) {
    LineCursor cur(line, number);

    const std::size_t seq_col = cur.column();
    const auto seq_text = cur.take_while([](char c) { return c >= '0' && c <= '9'; });
    std::uint64_t seq = 0;
    auto [ptr, ec] = std::from_chars(seq_text.data(), seq_text.data() + seq_text.size(), seq);
    if (seq_text.empty() || ec != std::errc() || seq == 0 || seq_text[0] == '0')
        cur.fail_at(seq_col, "expected a positive sequence number");
    if (cur.at_end() || !is_space(cur.peek())) cur.fail("expected a space after the sequence number");
    cur.skip_space();

    const std::size_t op_col = cur.column();
    const auto name = cur.take_while([](char c) { return (c >= 'A' && c <= 'Z') || c == '_'; });
    if (name.empty()) cur.fail_at(op_col, "expected an op name");
    if (!cur.at_end() && !is_space(cur.peek())) cur.fail("unexpected character in op name");
    const auto op = op_from_name(name);
    if (!op) schema_fail(number, op_col, seq, name, "unknown op");
    cur.expect_separator();

    const auto spec = schema(*op);
    FieldMap fields;
    std::optional<ContentHash> post_hash;
    while (!cur.at_end()) {
        const std::size_t key_col = cur.column();
        const std::string key = cur.key();
        cur.expect('=');
        const Token t = cur.value();
        check_lexical(cur, t);

        if (key == "hash") {
            if (post_hash) schema_fail(number, key_col, seq, name, "duplicate key 'hash'");
            post_hash = std::get<ContentHash>(typed(t, ValueKind::Hash, number, seq, name, key));
        } else {
            const auto it = std::find_if(spec.begin(), spec.end(),
                                         [&](const FieldSpec& f) { return f.key == key; });
            if (it == spec.end()) schema_fail(number, key_col, seq, name, "unexpected key '" + key + "'");
            if (fields.count(key)) schema_fail(number, key_col, seq, name, "duplicate key '" + key + "'");
            fields.emplace(key, typed(t, it->kind, number, seq, name, key));
        }
        cur.expect_separator();
    }
    if (!post_hash) schema_fail(number, cur.column(), seq, name, "missing key 'hash'");

    try {
        return {seq, build_action(*op, fields), *post_hash};
    } catch (Error& e) {
        e.at(number).with_seq(seq);
        throw;
    }
}

} // namespace

std::string quote(std::string_view raw) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "\"";
    for (char c : raw) {
        const auto u = static_cast<unsigned char>(c);
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (u < 0x20 || u == 0x7f) {
            out += "\\x";
            out += kDigits[u >> 4];
            out += kDigits[u & 0x0f];
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

std::string serialize_entry(const JournalEntry& entry) {
    std::string line = std::to_string(entry.seq);
    line += ' ';
    line += op_name(entry.op());
    for (const auto& [key, value] : fields_of(entry.action)) {
        line += ' ';
        line += key;
        line += '=';
        line += value_text(value);
    }
    line += " hash=";
    line += entry.post_hash.hex();
    return line;
}

std::string serialize(const Journal& journal) {
    if (journal.empty()) {
        throw Error(ErrorCode::InvariantViolation, "cannot serialize a journal without an IMPORT entry");
    }
    std::string out = std::string(kMagic) + std::to_string(Journal::kVersion) +
                      " source=" + quote(journal.source().name) +
                      " hash=" + journal.source().hash.hex() + "\n";
    for (const auto& e : journal.entries()) {
        out += serialize_entry(e);
        out += '\n';
    }
    return out;
}

Journal parse_journal(std::string_view text) {
    if (text.empty()) throw Error(ErrorCode::SyntaxError, "missing header").at(1, 1);

    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start < text.size();) {
        const std::size_t nl = text.find('\n', start);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (const auto cr = lines[i].find('\r'); cr != std::string_view::npos)
            throw Error(ErrorCode::SyntaxError, "carriage return in journal").at(i + 1, cr + 1);
    }

    const SourceRef source = parse_header(lines.front());

    std::vector<JournalEntry> entries;
    std::map<std::uint64_t, std::size_t> line_of_seq;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t number = i + 1;
        const auto first = lines[i].find_first_not_of(" \t");
        if (first == std::string_view::npos || lines[i][first] == '#') continue;

        JournalEntry e = parse_entry(lines[i], number);
        const std::uint64_t expected = entries.size() + 1;
        if (e.seq != expected) {
            throw Error(ErrorCode::SequenceError, "expected seq " + std::to_string(expected) +
                                                      ", found " + std::to_string(e.seq))
                .at(number, 1)
                .with_seq(e.seq);
        }
        line_of_seq[e.seq] = number;
        entries.push_back(std::move(e));
    }
    if (entries.empty()) {
        throw Error(ErrorCode::SequenceError, "journal has no IMPORT entry").at(lines.size() + 1);
    }

    try {
        return Journal(source, std::move(entries));
    } catch (Error& e) {
        if (e.seq()) e.at(line_of_seq[*e.seq()]);
        throw;
    }
}

} // namespace swiim
