#include "swiim/session.hpp"

#include "swiim/error.hpp"
#include "swiim/replay.hpp"

#include <openssl/rand.h>

#include <array>
#include <fstream>

namespace swiim {

std::string random_session_id() {
    std::array<unsigned char, 16> bytes{};
    if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) {
        throw Error(ErrorCode::InvariantViolation, "system random generator unavailable");
    }
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string id;
    for (unsigned char b : bytes) {
        id += kDigits[b >> 4];
        id += kDigits[b & 0x0f];
    }
    return id;
}

Session::Session(std::string id, Raster source, Journal journal)
    : id_(std::move(id)), history_(std::move(source)), journal_(std::move(journal)) {}

Session Session::open(Raster source, std::string name) {
    const ContentHash hash = content_hash(source);
    Journal journal = Journal(SourceRef{name, hash}).append(ImportAction{name}, hash);
    return Session(random_session_id(), std::move(source), std::move(journal));
}

void Session::commit(Journal next) {
    if (journal_path_) {
        const std::string text = serialize(next);
        std::ofstream out(*journal_path_, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw Error(ErrorCode::IoError, "cannot write journal to " + journal_path_->string());
    }
    journal_ = std::move(next);
}

void Session::apply(const Action& action) {
    if (!is_edit(kind_of(action))) {
        throw Error(ErrorCode::SchemaError,
                    std::string(op_name(kind_of(action))) + " is not an image operation");
    }
    Raster next = apply_edit(action, current(), assets_);
    const ContentHash hash = content_hash(next);
    Journal next_journal = journal_.append(action, hash);
    if (journal_path_) {
        // Flush first so a failed write leaves the session untouched.
        commit(std::move(next_journal));
        history_.push(std::move(next), hash);
        return;
    }
    history_.push(std::move(next), hash);
    journal_ = std::move(next_journal);
}

void Session::undo() {
    history_.undo();
    try {
        commit(journal_.append(UndoAction{}, history_.current_hash()));
    } catch (...) {
        history_.redo();
        throw;
    }
}

void Session::redo() {
    history_.redo();
    try {
        commit(journal_.append(RedoAction{}, history_.current_hash()));
    } catch (...) {
        history_.undo();
        throw;
    }
}

std::vector<std::uint8_t> Session::export_image(std::string file, ImageFormat format, int quality) {
    if (format != ImageFormat::Jpeg) quality = 0;
    std::vector<std::uint8_t> bytes = swiim::export_image(current(), format, quality);
    commit(journal_.append(ExportAction{std::move(file), format, quality}, current_hash()));
    return bytes;
}

ContentHash Session::add_asset(Raster insert) { return assets_.add(std::move(insert)); }

void Session::check_coherence() const {
    const ReplayResult run = replay(journal_, source(), assets_);
    if (!run.report.passed()) {
        throw Error(ErrorCode::InvariantViolation,
                    "journal replay diverges at seq " + std::to_string(*run.report.first_mismatch()));
    }
    if (content_hash(run.raster) != current_hash()) {
        throw Error(ErrorCode::InvariantViolation, "journal replay does not reproduce the current image");
    }
}

void Session::set_journal_path(std::optional<std::filesystem::path> path) {
    journal_path_ = std::move(path);
    if (journal_path_) commit(journal_);
}

} // namespace swiim
