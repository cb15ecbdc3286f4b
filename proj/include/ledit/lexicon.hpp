#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace ledit {

enum class Pos { Noun, Adjective, Other };

struct LexiconEntry {
    Pos pos = Pos::Other;
    std::vector<std::string> synonyms;
    std::vector<std::string> antonyms;
    std::vector<std::string> cohyponyms;
};

// POS-tagged vocabulary with synonym/antonym/co-hyponym relation edges.
// Validated on load: synonym and cohyponym edges symmetric, every related
// word present, no self-relations.
class Lexicon {
public:
    static Lexicon from_json_file(const std::string& path);
    static Lexicon from_json_text(const std::string& text);

    bool contains(const std::string& word) const { return entries_.count(word) > 0; }
    const LexiconEntry& entry(const std::string& word) const;

    bool is_editable(const std::string& word) const {
        auto it = entries_.find(word);
        return it != entries_.end() &&
               (it->second.pos == Pos::Noun || it->second.pos == Pos::Adjective);
    }

    // Vocabulary in a stable (sorted) order, without sentinels.
    std::vector<std::string> vocabulary() const;

    // FNV-1a hash of the canonicalized content; part of the reference
    // embedder version tag.
    uint64_t content_hash() const;

    size_t size() const { return entries_.size(); }

private:
    void validate() const;
    std::unordered_map<std::string, LexiconEntry> entries_;
};

// Whitespace tokenizer with lowercasing and trailing-punctuation stripping.
std::vector<std::string> tokenize(const std::string& caption);
std::string detokenize(const std::vector<std::string>& tokens);

inline const char* kMaskToken = "<mask>";

} // namespace ledit
