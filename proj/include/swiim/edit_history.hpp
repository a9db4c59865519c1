#pragma once

#include "swiim/content_hash.hpp"
#include "swiim/journal.hpp"
#include "swiim/raster.hpp"

#include <map>
#include <memory>
#include <vector>

namespace swiim {

/// Rasters referenced by MELD entries, keyed by their content hash.
class AssetStore {
public:
    ContentHash add(Raster raster);
    /// nullptr when unknown.
    const Raster* find(const ContentHash& hash) const;
    std::size_t size() const noexcept { return assets_.size(); }

private:
    std::map<ContentHash, std::shared_ptr<const Raster>> assets_;
};

struct Snapshot {
    ContentHash hash;
    std::shared_ptr<const Raster> raster;
};

/// Undo/redo state machine over full-raster snapshots. Both live sessions
/// and journal replay drive one of these, so UNDO/REDO mean the same thing
/// in both places.
///
/// The archive keeps every state ever produced (index 0 is the source).
/// The undo path is the chain of archive indices from the source to the
/// newest state on the current branch; current is undo_depth steps back from
/// its end. push() drops whatever sits above the cursor from the path but
/// never from the archive.
class EditHistory {
public:
    explicit EditHistory(Raster source);

    const Raster& current() const { return *archive_[path_[cursor()]].raster; }
    const ContentHash& current_hash() const { return archive_[path_[cursor()]].hash; }
    std::shared_ptr<const Raster> current_shared() const { return archive_[path_[cursor()]].raster; }

    void push(Raster next);
    /// As push(Raster), with the hash already computed by the caller.
    void push(Raster next, const ContentHash& hash);
    /// NothingToUndo / NothingToRedo when the cursor cannot move.
    void undo();
    void redo();

    bool can_undo() const noexcept { return cursor() > 0; }
    bool can_redo() const noexcept { return undo_depth_ > 0; }

    std::size_t undo_depth() const noexcept { return undo_depth_; }
    std::size_t archive_size() const noexcept { return archive_.size(); }
    const Snapshot& archived(std::size_t i) const { return archive_.at(i); }
    std::size_t path_length() const noexcept { return path_.size(); }

private:
    std::size_t cursor() const noexcept { return path_.size() - 1 - undo_depth_; }

    std::vector<Snapshot> archive_;
    std::vector<std::size_t> path_;
    std::size_t undo_depth_ = 0;
};

/// Runs an image-core action (CROP..MELD) against `current`. MELD inserts are
/// looked up in `assets` (AssetMissing when absent).
Raster apply_edit(const Action& action, const Raster& current, const AssetStore& assets);

} // namespace swiim
