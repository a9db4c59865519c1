#include "swiim/edit_history.hpp"

#include "swiim/error.hpp"

namespace swiim {

ContentHash AssetStore::add(Raster raster) {
    const ContentHash hash = content_hash(raster);
    assets_.try_emplace(hash, std::make_shared<const Raster>(std::move(raster)));
    return hash;
}

const Raster* AssetStore::find(const ContentHash& hash) const {
    const auto it = assets_.find(hash);
    return it == assets_.end() ? nullptr : it->second.get();
}

EditHistory::EditHistory(Raster source) {
    const ContentHash hash = content_hash(source);
    archive_.push_back({hash, std::make_shared<const Raster>(std::move(source))});
    path_.push_back(0);
}

void EditHistory::push(Raster next) {
    const ContentHash hash = content_hash(next);
    push(std::move(next), hash);
}

void EditHistory::push(Raster next, const ContentHash& hash) {
    Snapshot snap{hash, std::make_shared<const Raster>(std::move(next))};
    archive_.reserve(archive_.size() + 1);
    path_.reserve(path_.size() + 1);
    // Nothing below can throw once capacity is reserved.
    path_.resize(path_.size() - undo_depth_);
    undo_depth_ = 0;
    archive_.push_back(std::move(snap));
    path_.push_back(archive_.size() - 1);
}

void EditHistory::undo() {
    if (!can_undo()) throw Error(ErrorCode::NothingToUndo, "no applied operation to undo");
    ++undo_depth_;
}

void EditHistory::redo() {
    if (!can_redo()) throw Error(ErrorCode::NothingToRedo, "no undone operation to redo");
    --undo_depth_;
}

Raster apply_edit(const Action& action, const Raster& current, const AssetStore& assets) {
    return std::visit(
        [&](const auto& a) -> Raster {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, CropAction>) {
                return crop(current, a.rect);
            } else if constexpr (std::is_same_v<T, RotateAction>) {
                return rotate(current, a.turns);
            } else if constexpr (std::is_same_v<T, FlipAction>) {
                return flip(current, a.axis);
            } else if constexpr (std::is_same_v<T, ToneAction>) {
                return brightness_contrast(current, {a.brightness.value(), a.contrast.value()});
            } else if constexpr (std::is_same_v<T, BalanceAction>) {
                return color_balance(current, {a.r.value(), a.g.value(), a.b.value()});
            } else if constexpr (std::is_same_v<T, HueAction>) {
                return hue_rotate(current, {a.degrees.value()});
            } else if constexpr (std::is_same_v<T, ThresholdAction>) {
                return threshold(current, a.level.value());
            } else if constexpr (std::is_same_v<T, EqualizeAction>) {
                return equalize_histogram(current);
            } else if constexpr (std::is_same_v<T, MeldAction>) {
                const Raster* insert = assets.find(a.insert_hash);
                if (!insert) {
                    throw Error(ErrorCode::AssetMissing, "MELD insert \"" + a.file + "\" with hash " +
                                                             a.insert_hash.hex() + " is not available");
                }
                return meld(current, *insert, {a.x, a.y, a.border_width, a.border_color});
            } else {
                throw Error(ErrorCode::SchemaError,
                            std::string(op_name(kind_of(action))) + " is not an image operation");
            }
        },
        action);
}

} // namespace swiim
