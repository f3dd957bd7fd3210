#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "aded/common.hpp"

namespace aded {

struct CorpusStats {
    std::uint64_t documents = 0;
    std::uint64_t tokens = 0;
    std::uint64_t distinct_trigrams = 0;
    std::uint64_t distinct_bigram_contexts = 0;
};

// Exact, unbounded tri-gram count accumulator. One instance per ingestion
// worker; workers merge by summation. Pruning happens later, at matrix
// finalization.
class TrigramCounts {
public:
    using ContinuationCounts = std::unordered_map<TokenId, std::uint64_t>;

    // Slides a window over one document. Sequences shorter than 3 contribute
    // nothing; windows never span documents.
    void add_document(const std::vector<TokenId>& tokens) {
        ++documents_;
        tokens_ += tokens.size();
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            std::uint64_t ctx = pack_context(tokens[i - 2], tokens[i - 1]);
            ++trigrams_[ctx][tokens[i]];
            ++bigram_contexts_[ctx];
        }
    }

    void merge(const TrigramCounts& other) {
        documents_ += other.documents_;
        tokens_ += other.tokens_;
        for (const auto& [ctx, conts] : other.trigrams_) {
            auto& mine = trigrams_[ctx];
            for (const auto& [tok, n] : conts) mine[tok] += n;
        }
        for (const auto& [ctx, n] : other.bigram_contexts_) bigram_contexts_[ctx] += n;
    }

    std::uint64_t trigram_count(TokenId a, TokenId b, TokenId c) const {
        auto it = trigrams_.find(pack_context(a, b));
        if (it == trigrams_.end()) return 0;
        auto jt = it->second.find(c);
        return jt == it->second.end() ? 0 : jt->second;
    }

    std::uint64_t bigram_context_count(TokenId a, TokenId b) const {
        auto it = bigram_contexts_.find(pack_context(a, b));
        return it == bigram_contexts_.end() ? 0 : it->second;
    }

    CorpusStats stats() const {
        CorpusStats s;
        s.documents = documents_;
        s.tokens = tokens_;
        s.distinct_bigram_contexts = bigram_contexts_.size();
        for (const auto& [ctx, conts] : trigrams_) s.distinct_trigrams += conts.size();
        return s;
    }

    const std::unordered_map<std::uint64_t, ContinuationCounts>& contexts() const { return trigrams_; }
    bool empty() const { return trigrams_.empty(); }

private:
    std::unordered_map<std::uint64_t, ContinuationCounts> trigrams_;
    std::unordered_map<std::uint64_t, std::uint64_t> bigram_contexts_;
    std::uint64_t documents_ = 0;
    std::uint64_t tokens_ = 0;
};

inline void count_trigrams(const std::vector<TokenId>& tokens, TrigramCounts& acc) {
    acc.add_document(tokens);
}

}  // namespace aded
