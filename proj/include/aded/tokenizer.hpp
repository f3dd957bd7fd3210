#pragma once

#include <cctype>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aded/common.hpp"
#include "aded/vocab.hpp"

namespace aded {

enum class TokenizerMode {
    WhitespaceWord,        // words split on ASCII whitespace
    ByteLevel,             // token id = byte value, fixed vocab of 256
    ExternalPretokenized,  // binary u32-le records produced by an external tokenizer
};

inline constexpr std::size_t kByteVocabSize = 256;

struct MalformedInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

// Parses one pretokenized document record: u32-le id count, then that many
// u32-le ids. `offset` advances past the record. Ids must be < vocab_size.
inline std::vector<TokenId> parse_pretokenized_record(std::string_view bytes, std::size_t vocab_size,
                                                      std::size_t& offset) {
    if (offset + 4 > bytes.size()) throw MalformedInputError("pretokenized: truncated record header");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    std::uint32_t count = detail::read_u32le(p + offset);
    offset += 4;
    if (offset + 4ull * count > bytes.size()) throw MalformedInputError("pretokenized: truncated record payload");
    std::vector<TokenId> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        TokenId id = detail::read_u32le(p + offset);
        offset += 4;
        if (id >= vocab_size)
            throw MalformedInputError("pretokenized: id " + std::to_string(id) +
                                      " >= vocab size " + std::to_string(vocab_size));
        out.push_back(id);
    }
    return out;
}

// Deterministic tokenization. Whitespace-word mode grows a mutable vocab in
// first-occurrence order and maps unseen surfaces to <unk> once frozen.
// Byte-level ignores the vocab (ids are byte values). Pretokenized mode
// treats `text` as one binary record and validates ids against vocab.size().
inline std::vector<TokenId> tokenize(std::string_view text, Vocabulary& vocab, TokenizerMode mode) {
    std::vector<TokenId> out;
    switch (mode) {
        case TokenizerMode::WhitespaceWord: {
            std::size_t i = 0;
            while (i < text.size()) {
                while (i < text.size() && detail::is_space(static_cast<unsigned char>(text[i]))) ++i;
                std::size_t start = i;
                while (i < text.size() && !detail::is_space(static_cast<unsigned char>(text[i]))) ++i;
                if (i > start) out.push_back(vocab.add_or_get(text.substr(start, i - start)));
            }
            break;
        }
        case TokenizerMode::ByteLevel: {
            out.reserve(text.size());
            for (char c : text) out.push_back(static_cast<TokenId>(static_cast<unsigned char>(c)));
            break;
        }
        case TokenizerMode::ExternalPretokenized: {
            std::size_t offset = 0;
            out = parse_pretokenized_record(text, vocab.size(), offset);
            if (offset != text.size()) throw MalformedInputError("pretokenized: trailing bytes after record");
            break;
        }
    }
    return out;
}

// Inverse of tokenize on normalized input. Whitespace-word joins surfaces
// with single spaces; byte-level concatenates raw bytes.
inline std::string detokenize(const std::vector<TokenId>& tokens, const Vocabulary& vocab,
                              TokenizerMode mode) {
    std::string out;
    switch (mode) {
        case TokenizerMode::WhitespaceWord: {
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                if (i) out += ' ';
                out += vocab.surface(tokens[i]);
            }
            break;
        }
        case TokenizerMode::ByteLevel: {
            for (TokenId t : tokens) out += static_cast<char>(static_cast<unsigned char>(t));
            break;
        }
        case TokenizerMode::ExternalPretokenized:
            throw std::logic_error("detokenize: pretokenized ids have no surfaces");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Document readers
// ---------------------------------------------------------------------------

enum class DocSplit {
    PerFile,  // one document per file
    Lines,    // newline-delimited documents
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

inline std::vector<std::string> read_documents(const std::string& path, DocSplit split) {
    std::string data = read_file(path);
    if (split == DocSplit::PerFile) return {std::move(data)};
    std::vector<std::string> docs;
    std::size_t start = 0;
    while (start <= data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) {
            if (start < data.size()) docs.emplace_back(data.substr(start));
            break;
        }
        if (end > start) docs.emplace_back(data.substr(start, end - start));
        start = end + 1;
    }
    return docs;
}

// Reads every document record from a pretokenized binary file.
inline std::vector<std::vector<TokenId>> read_pretokenized_file(const std::string& path,
                                                                std::size_t vocab_size) {
    std::string data = read_file(path);
    std::vector<std::vector<TokenId>> docs;
    std::size_t offset = 0;
    while (offset < data.size()) {
        docs.push_back(parse_pretokenized_record(data, vocab_size, offset));
    }
    return docs;
}

}  // namespace aded
