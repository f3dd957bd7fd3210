#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "aded/common.hpp"
#include "aded/trigram_counts.hpp"

namespace aded {

inline constexpr std::size_t kDefaultRetention = 64;

// Continuations of one two-token context. Entries stay sorted by descending
// weight, ties by ascending token; the weight total is cached so conditional
// probabilities are one division away.
class ContinuationTable {
public:
    struct Entry {
        TokenId token = 0;
        double weight = 0.0;
    };

    const std::vector<Entry>& entries() const { return entries_; }
    double total() const { return total_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    double weight_of(TokenId token) const {
        for (const auto& e : entries_)
            if (e.token == token) return e.weight;
        return 0.0;
    }

    double share_of(TokenId token) const {
        return total_ > 0.0 ? weight_of(token) / total_ : 0.0;
    }

    // Sets (or inserts) an entry weight, then restores sort order and the
    // cached total. Weight must be positive.
    void set_weight(TokenId token, double weight) {
        for (auto& e : entries_) {
            if (e.token == token) {
                e.weight = weight;
                finish();
                return;
            }
        }
        entries_.push_back({token, weight});
        finish();
    }

    // Bulk-construction append; caller must finish() afterwards.
    void append_raw(TokenId token, double weight) { entries_.push_back({token, weight}); }

    // Rescales all weights so the total becomes `target`. Shares are
    // unchanged; this keeps weights bounded across repeated adjustments.
    void rescale_total(double target) {
        if (total_ <= 0.0) return;
        double f = target / total_;
        for (auto& e : entries_) e.weight *= f;
        total_ = target;
    }

    // Drops lowest-weight entries until at most `bound` remain.
    void enforce_bound(std::size_t bound) {
        if (entries_.size() <= bound) return;
        entries_.resize(bound);
        recompute_total();
    }

    void finish() {
        std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            return a.token < b.token;
        });
        recompute_total();
    }

    Dist distribution() const {
        Dist d;
        d.reserve(entries_.size());
        if (total_ <= 0.0) return d;
        for (const auto& e : entries_) d.push_back({e.token, e.weight / total_});
        return d;
    }

private:
    void recompute_total() {
        total_ = 0.0;
        for (const auto& e : entries_) total_ += e.weight;
    }

    std::vector<Entry> entries_;
    double total_ = 0.0;
};

// Parameters of the dynamic probability adjustment. The increment and cap
// are probability shares; max_length bounds the trailing token window.
struct AdjustPolicy {
    double increment = 0.05;
    double max_prob = 0.95;
    std::size_t max_length = 64;
};

// The pruned conditional-probability matrix standing in for the target
// model. Lower-order fallback tables are derived from the retained tri-gram
// entries (at finalization and again after load, so a saved matrix behaves
// identically when read back). Adjustment touches tri-gram rows only; the
// fallback tables are a static prior.
class TrigramMatrix {
public:
    TrigramMatrix() = default;
    TrigramMatrix(std::uint32_t vocab_size, std::uint32_t threshold, std::size_t retention)
        : vocab_size_(vocab_size), threshold_(threshold), retention_(retention) {}

    std::uint32_t vocab_size() const { return vocab_size_; }
    std::uint32_t threshold() const { return threshold_; }
    std::size_t retention() const { return retention_; }
    std::size_t context_count() const { return contexts_.size(); }
    bool empty() const { return contexts_.empty(); }

    const std::unordered_map<std::uint64_t, ContinuationTable>& contexts() const { return contexts_; }

    const ContinuationTable* find(TokenId a, TokenId b) const {
        auto it = contexts_.find(pack_context(a, b));
        return it == contexts_.end() ? nullptr : &it->second;
    }

    // Conditional distribution for a known context; empty for unknown ones
    // (callers apply backoff).
    Dist conditional(TokenId a, TokenId b) const {
        const ContinuationTable* t = find(a, b);
        return t ? t->distribution() : Dist{};
    }

    // Tri-gram lookup with bi-gram then unigram fallback. `level_out`, when
    // given, reports 0/1/2 for the order that answered (2 = unigram).
    Dist conditional_backoff(TokenId a, TokenId b, int* level_out = nullptr) const {
        if (const ContinuationTable* t = find(a, b); t && !t->empty()) {
            if (level_out) *level_out = 0;
            return t->distribution();
        }
        if (auto it = bigram_.find(b); it != bigram_.end() && !it->second.empty()) {
            if (level_out) *level_out = 1;
            return it->second.distribution();
        }
        if (level_out) *level_out = 2;
        return unigram_.distribution();
    }

    // Applies the share-increment rule over tri-gram windows of the trailing
    // `policy.max_length` tokens. Present continuations have their share
    // raised by `increment` and clamped at `max_prob`; absent ones are
    // inserted at share `increment`. Weight arithmetic keeps each touched
    // row exactly normalized.
    void adjust_from_recent(const std::vector<TokenId>& tokens, const AdjustPolicy& policy) {
        std::size_t n = tokens.size();
        std::size_t start = n > policy.max_length ? n - policy.max_length : 0;
        for (std::size_t i = start + 2; i < n; ++i) {
            adjust_one(tokens[i - 2], tokens[i - 1], tokens[i], policy);
        }
    }

    void adjust_one(TokenId a, TokenId b, TokenId c, const AdjustPolicy& policy) {
        auto [it, inserted] = contexts_.try_emplace(pack_context(a, b));
        ContinuationTable& table = it->second;
        if (inserted) {
            // Fresh context: the sole continuation carries the whole mass.
            table.set_weight(c, 1.0);
            return;
        }
        double total = table.total();
        double current = table.weight_of(c);
        double rest = total - current;
        if (rest <= 0.0) {
            // Single-continuation row: its share is 1.0 no matter the weight.
            return;
        }
        double share;
        if (current > 0.0) {
            share = std::min(current / total + policy.increment, policy.max_prob);
        } else {
            share = policy.increment;
        }
        share = std::min(share, 1.0 - 1e-12);
        table.set_weight(c, share * rest / (1.0 - share));
        table.enforce_bound(retention_);
        table.rescale_total(1.0);
    }

    // Construction hooks used by finalize_matrix and the file loader.
    void insert_context(std::uint64_t key, ContinuationTable table) {
        contexts_.emplace(key, std::move(table));
    }

    void set_header(std::uint32_t vocab_size, std::uint32_t threshold, std::size_t retention) {
        vocab_size_ = vocab_size;
        threshold_ = threshold;
        retention_ = retention;
    }

    // Rebuilds the bi-gram and unigram fallback tables from the retained
    // tri-gram entries.
    void rebuild_backoff() {
        bigram_.clear();
        std::unordered_map<TokenId, std::unordered_map<TokenId, double>> bi;
        std::unordered_map<TokenId, double> uni;
        for (const auto& [key, table] : contexts_) {
            TokenId b = unpack_context(key).second;
            for (const auto& e : table.entries()) {
                bi[b][e.token] += e.weight;
                uni[e.token] += e.weight;
            }
        }
        for (auto& [b, conts] : bi) {
            ContinuationTable t;
            for (const auto& [tok, w] : conts) t.append_raw(tok, w);
            t.finish();
            t.enforce_bound(retention_);
            bigram_.emplace(b, std::move(t));
        }
        unigram_ = ContinuationTable();
        for (const auto& [tok, w] : uni) unigram_.append_raw(tok, w);
        unigram_.finish();
        unigram_.enforce_bound(retention_);
    }

private:
    std::unordered_map<std::uint64_t, ContinuationTable> contexts_;
    std::unordered_map<TokenId, ContinuationTable> bigram_;
    ContinuationTable unigram_;
    std::uint32_t vocab_size_ = 0;
    std::uint32_t threshold_ = 1;
    std::size_t retention_ = kDefaultRetention;
};

// Prunes raw counts into the matrix: continuations with count < t are
// eliminated, empty contexts dropped, and each row capped at `retention`
// entries by weight. Row totals are the sums of retained weights.
inline TrigramMatrix finalize_matrix(const TrigramCounts& counts, std::uint32_t t,
                                     std::uint32_t vocab_size = 0,
                                     std::size_t retention = kDefaultRetention) {
    if (t < 1) throw std::invalid_argument("finalize_matrix: t must be >= 1");
    TrigramMatrix m(vocab_size, t, retention);
    for (const auto& [key, conts] : counts.contexts()) {
        ContinuationTable table;
        for (const auto& [tok, n] : conts) {
            if (n >= t) table.append_raw(tok, static_cast<double>(n));
        }
        if (table.empty()) continue;
        table.finish();
        table.enforce_bound(retention);
        m.insert_context(key, std::move(table));
    }
    m.rebuild_backoff();
    return m;
}

}  // namespace aded
