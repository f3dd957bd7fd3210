#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

namespace aded {

using TokenId = std::uint32_t;

// Reserved sequence-start sentinel. Never assigned by a Vocabulary and never
// produced by tokenization; real ids are always < vocab size.
inline constexpr TokenId kSentinelToken = 0xFFFFFFFFu;

// Sparse distribution over tokens, kept sorted by descending probability,
// ties by ascending token id.
struct TokenProb {
    TokenId token = 0;
    double prob = 0.0;
};

using Dist = std::vector<TokenProb>;

inline void sort_dist(Dist& d) {
    std::stable_sort(d.begin(), d.end(), [](const TokenProb& a, const TokenProb& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.token < b.token;
    });
}

// Argmax with ties broken to the lowest token id. Assumes non-empty input;
// does not assume sortedness.
inline TokenId dist_argmax(const Dist& d) {
    TokenId best = d.front().token;
    double best_p = d.front().prob;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (d[i].prob > best_p || (d[i].prob == best_p && d[i].token < best)) {
            best = d[i].token;
            best_p = d[i].prob;
        }
    }
    return best;
}

inline void normalize_dist(Dist& d) {
    double total = 0.0;
    for (const auto& e : d) total += e.prob;
    if (total <= 0.0) return;
    for (auto& e : d) e.prob /= total;
}

// Packs a two-token context into one map key.
inline std::uint64_t pack_context(TokenId first, TokenId second) {
    return (static_cast<std::uint64_t>(first) << 32) | second;
}

inline std::pair<TokenId, TokenId> unpack_context(std::uint64_t key) {
    return {static_cast<TokenId>(key >> 32), static_cast<TokenId>(key & 0xFFFFFFFFu)};
}

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------
// Counter-based splitmix64 stream. Unlike std:: distributions, the outputs
// are identical across platforms and standard-library versions, which keeps
// seeded runs byte-for-byte reproducible.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(splitmix64(seed ^ splitmix64(stream))) {}

    std::uint64_t next_u64() { return splitmix64(state_++); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    // Inverse-CDF draw from an unnormalized weight sequence. Returns the
    // index of the chosen element; the last index absorbs rounding slack.
    template <typename GetWeight>
    std::size_t sample_index(std::size_t count, GetWeight&& weight_of) {
        double total = 0.0;
        for (std::size_t i = 0; i < count; ++i) total += weight_of(i);
        double u = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < count; ++i) {
            acc += weight_of(i);
            if (u < acc) return i;
        }
        return count - 1;
    }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Logging
// ---------------------------------------------------------------------------
// Level comes from the ADED_LOG environment variable:
// off | error | warn | info | debug. Default is warn.

enum class LogLevel : int { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("ADED_LOG");
        if (!env) return LogLevel::Warn;
        std::string v(env);
        if (v == "off") return LogLevel::Off;
        if (v == "error") return LogLevel::Error;
        if (v == "warn") return LogLevel::Warn;
        if (v == "info") return LogLevel::Info;
        if (v == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

template <typename... Args>
inline void log_at(LogLevel lvl, const char* tag, const char* fmt, Args... args) {
    if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
    std::fprintf(stderr, "[aded:%s] ", tag);
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
}

#define ADED_LOG_ERROR(...) ::aded::log_at(::aded::LogLevel::Error, "error", __VA_ARGS__)
#define ADED_LOG_WARN(...) ::aded::log_at(::aded::LogLevel::Warn, "warn", __VA_ARGS__)
#define ADED_LOG_INFO(...) ::aded::log_at(::aded::LogLevel::Info, "info", __VA_ARGS__)
#define ADED_LOG_DEBUG(...) ::aded::log_at(::aded::LogLevel::Debug, "debug", __VA_ARGS__)

}  // namespace aded
