#include "ledit/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ledit/common.hpp"

namespace ledit {

namespace {
Pos pos_from_string(const std::string& s) {
    if (s == "noun") return Pos::Noun;
    if (s == "adjective") return Pos::Adjective;
    if (s == "other") return Pos::Other;
    throw DataError("lexicon: unknown pos tag '" + s + "'");
}
} // namespace

Lexicon Lexicon::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

Lexicon Lexicon::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("lexicon: invalid JSON: ") + e.what());
    }
    Lexicon lex;
    for (auto& [word, body] : doc.at("entries").items()) {
        LexiconEntry e;
        e.pos = pos_from_string(body.at("pos").get<std::string>());
        for (const char* rel : {"synonyms", "antonyms", "cohyponyms"}) {
            if (!body.contains(rel)) continue;
            auto& target = rel == std::string("synonyms")  ? e.synonyms
                           : rel == std::string("antonyms") ? e.antonyms
                                                            : e.cohyponyms;
            for (const auto& w : body.at(rel)) target.push_back(w.get<std::string>());
        }
        lex.entries_[word] = std::move(e);
    }
    lex.validate();
    return lex;
}

void Lexicon::validate() const {
    auto has = [&](const std::vector<std::string>& v, const std::string& w) {
        return std::find(v.begin(), v.end(), w) != v.end();
    };
    for (const auto& [word, e] : entries_) {
        auto check_rel = [&](const std::vector<std::string>& rel, const char* name, bool symmetric) {
            for (const auto& other : rel) {
                if (other == word)
                    throw DataError("lexicon: '" + word + "' lists itself under " + name);
                auto it = entries_.find(other);
                if (it == entries_.end())
                    throw DataError("lexicon: '" + word + "' relates to unknown word '" + other + "'");
                if (symmetric) {
                    const auto& back = name == std::string("synonyms") ? it->second.synonyms
                                                                       : it->second.cohyponyms;
                    if (!has(back, word))
                        throw DataError("lexicon: asymmetric " + std::string(name) + " edge " +
                                        word + " -> " + other);
                }
            }
        };
        check_rel(e.synonyms, "synonyms", true);
        check_rel(e.cohyponyms, "cohyponyms", true);
        check_rel(e.antonyms, "antonyms", false);
    }
}

const LexiconEntry& Lexicon::entry(const std::string& word) const {
    auto it = entries_.find(word);
    if (it == entries_.end()) throw DataError("lexicon: unknown word '" + word + "'");
    return it->second;
}

std::vector<std::string> Lexicon::vocabulary() const {
    std::vector<std::string> words;
    words.reserve(entries_.size());
    for (const auto& [w, _] : entries_) words.push_back(w);
    std::sort(words.begin(), words.end());
    return words;
}

uint64_t Lexicon::content_hash() const {
    // Canonical order so the hash is independent of map iteration order.
    std::map<std::string, const LexiconEntry*> ordered;
    for (const auto& [w, e] : entries_) ordered[w] = &e;
    uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0x1f;
        h *= 1099511628211ULL;
    };
    for (const auto& [w, e] : ordered) {
        feed(w);
        feed(std::to_string(static_cast<int>(e.pos)));
        auto feed_sorted = [&](std::vector<std::string> v) {
            std::sort(v.begin(), v.end());
            for (const auto& s : v) feed(s);
        };
        feed_sorted(e.synonyms);
        feed_sorted(e.antonyms);
        feed_sorted(e.cohyponyms);
    }
    return h;
}

std::vector<std::string> tokenize(const std::string& caption) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : caption) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        } else if (ch == ',' || ch == '.' || ch == '!' || ch == '?' || ch == ';') {
            // drop punctuation
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

} // namespace ledit
