#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aded/common.hpp"

namespace aded {

// Bijective surface <-> id map. Ids are assigned in first-occurrence order.
// A frozen vocabulary maps unseen surfaces to the unknown token instead of
// growing.
class Vocabulary {
public:
    static constexpr const char* kUnknownSurface = "<unk>";

    Vocabulary() = default;

    TokenId add_or_get(std::string_view surface) {
        auto it = ids_.find(std::string(surface));
        if (it != ids_.end()) return it->second;
        if (frozen_) return unknown_id();
        TokenId id = static_cast<TokenId>(surfaces_.size());
        surfaces_.emplace_back(surface);
        ids_.emplace(surfaces_.back(), id);
        return id;
    }

    // Returns the id or kSentinelToken when absent (sentinel is never a real id).
    TokenId lookup(std::string_view surface) const {
        auto it = ids_.find(std::string(surface));
        return it == ids_.end() ? kSentinelToken : it->second;
    }

    const std::string& surface(TokenId id) const {
        if (id >= surfaces_.size()) throw std::out_of_range("Vocabulary: id out of range");
        return surfaces_[id];
    }

    std::size_t size() const { return surfaces_.size(); }
    bool frozen() const { return frozen_; }

    // Freezing registers the unknown surface so lookups of unseen words have
    // somewhere to land.
    void freeze() {
        if (frozen_) return;
        if (ids_.find(kUnknownSurface) == ids_.end()) {
            TokenId id = static_cast<TokenId>(surfaces_.size());
            surfaces_.emplace_back(kUnknownSurface);
            ids_.emplace(surfaces_.back(), id);
        }
        frozen_ = true;
    }

    TokenId unknown_id() const {
        auto it = ids_.find(kUnknownSurface);
        return it == ids_.end() ? kSentinelToken : it->second;
    }

    TokenId sentinel_id() const { return kSentinelToken; }

private:
    std::vector<std::string> surfaces_;
    std::unordered_map<std::string, TokenId> ids_;
    bool frozen_ = false;
};

}  // namespace aded
