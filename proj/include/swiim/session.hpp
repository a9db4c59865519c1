#pragma once

#include "swiim/codecs.hpp"
#include "swiim/content_hash.hpp"
#include "swiim/edit_history.hpp"
#include "swiim/journal.hpp"
#include "swiim/raster.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swiim {

/// Live editing state: the retained source, every state visited, the undo
/// cursor and the journal that records how they were reached. All mutations
/// go through here, and each one either fully happens (new state + one
/// journal line) or leaves the session exactly as it was.
class Session {
public:
    /// Journal starts with header + IMPORT; history holds just the source.
    static Session open(Raster source, std::string name);

    const std::string& id() const noexcept { return id_; }
    const std::string& source_name() const noexcept { return journal_.source().name; }
    const ContentHash& source_hash() const noexcept { return journal_.source().hash; }
    const Raster& source() const { return *history_.archived(0).raster; }
    const Raster& current() const { return history_.current(); }
    const ContentHash& current_hash() const { return history_.current_hash(); }
    std::shared_ptr<const Raster> current_shared() const { return history_.current_shared(); }
    const Journal& journal() const noexcept { return journal_; }
    const AssetStore& assets() const noexcept { return assets_; }

    /// Every state ever produced, source first. Length = successful edits + 1.
    std::size_t history_length() const noexcept { return history_.archive_size(); }
    std::size_t undo_depth() const noexcept { return history_.undo_depth(); }
    const EditHistory& history() const noexcept { return history_; }

    /// Applies an image-core action (CROP..MELD). Anything else is a
    /// SchemaError. MELD inserts must have been registered with add_asset().
    void apply(const Action& action);
    void undo();
    void redo();

    /// Encodes the current state and records an EXPORT entry. For lossless
    /// formats the recorded quality is 0 whatever is passed.
    std::vector<std::uint8_t> export_image(std::string file, ImageFormat format,
                                           int quality = kDefaultJpegQuality);

    /// Registers an image that MELD actions may reference by hash.
    ContentHash add_asset(Raster insert);

    /// Replays the journal against the source and throws InvariantViolation
    /// unless it reproduces the current state.
    void check_coherence() const;

    /// When set, the canonical journal is rewritten to this path after every
    /// append.
    void set_journal_path(std::optional<std::filesystem::path> path);

private:
    Session(std::string id, Raster source, Journal journal);

    void commit(Journal next);

    std::string id_;
    EditHistory history_;
    Journal journal_;
    AssetStore assets_;
    std::optional<std::filesystem::path> journal_path_;
};

/// 128 random bits as 32 lowercase hex characters.
std::string random_session_id();

} // namespace swiim
