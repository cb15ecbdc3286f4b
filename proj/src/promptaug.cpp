#include "ledit/promptaug.hpp"

#include <algorithm>
#include <cmath>

#include "ledit/common.hpp"

namespace ledit {

std::string MaskedPrompt::realized(const std::string& replacement) const {
    std::vector<std::string> t = tokens;
    t[static_cast<size_t>(slot_index)] = replacement;
    return detokenize(t);
}

MaskedPrompt mask_token(const std::string& caption, const Lexicon& lexicon, Rng& rng) {
    std::vector<std::string> tokens = tokenize(caption);
    std::vector<int> eligible;
    for (size_t i = 0; i < tokens.size(); ++i)
        if (lexicon.is_editable(tokens[i])) eligible.push_back(static_cast<int>(i));
    if (eligible.empty())
        throw NoEditableTokenError("no noun or adjective to mask in '" + caption + "'");
    int slot = eligible[rng.uniform_int(static_cast<uint32_t>(eligible.size()))];
    MaskedPrompt mp;
    mp.original_word = tokens[static_cast<size_t>(slot)];
    mp.pos = lexicon.entry(mp.original_word).pos;
    mp.slot_index = slot;
    mp.tokens = std::move(tokens);
    mp.tokens[static_cast<size_t>(slot)] = kMaskToken;
    return mp;
}

CandidatePool build_pool(const MaskedPrompt& masked, const Lexicon& lexicon,
                         const MaskedLmAdapter* mlm) {
    if (!lexicon.contains(masked.original_word))
        throw DataError("build_pool: '" + masked.original_word + "' not in lexicon");
    CandidatePool pool;
    auto push = [&](const std::string& w, CandidateSource src) {
        if (w == masked.original_word) return;
        if (std::find(pool.words.begin(), pool.words.end(), w) != pool.words.end()) return;
        pool.words.push_back(w);
        pool.sources.push_back(src);
    };
    if (mlm) {
        std::vector<std::string> proposals;
        try {
            proposals = mlm->propose(masked.tokens, masked.slot_index);
        } catch (const std::exception& e) {
            throw AdapterError(std::string("masked-LM adapter failed: ") + e.what());
        }
        for (const auto& w : proposals) push(w, CandidateSource::Mlm);
    }
    const LexiconEntry& e = lexicon.entry(masked.original_word);
    for (const auto& w : e.synonyms) push(w, CandidateSource::Synonym);
    for (const auto& w : e.antonyms) push(w, CandidateSource::Antonym);
    for (const auto& w : e.cohyponyms) push(w, CandidateSource::Cohyponym);
    if (pool.words.empty())
        throw AugmentationUnavailableError("empty candidate pool for '" + masked.original_word + "'");
    return pool;
}

std::vector<std::string> sample_hard(const CandidatePool& pool, int n, Rng& rng) {
    if (n <= 0) throw std::invalid_argument("sample_hard: n must be positive");
    if (static_cast<int>(pool.words.size()) < n)
        throw AugmentationUnavailableError("candidate pool smaller than requested draw");
    // Partial Fisher-Yates on a sorted copy; sorting makes the draw a
    // function of the word set rather than pool order.
    std::vector<std::string> words = pool.words;
    std::sort(words.begin(), words.end());
    for (int i = 0; i < n; ++i) {
        uint32_t j = static_cast<uint32_t>(i) +
                     rng.uniform_int(static_cast<uint32_t>(words.size() - static_cast<size_t>(i)));
        std::swap(words[static_cast<size_t>(i)], words[j]);
    }
    words.resize(static_cast<size_t>(n));
    return words;
}

std::vector<std::string> sample_soft(const CandidatePool& pool, int n,
                                     const MaskedPrompt& masked, const TextEmbedder& embedder,
                                     Rng& rng) {
    if (n <= 0) throw std::invalid_argument("sample_soft: n must be positive");
    if (static_cast<int>(pool.words.size()) < n)
        throw AugmentationUnavailableError("candidate pool smaller than requested draw");

    std::string source = masked.realized(masked.original_word);
    PromptEmbedding src = embedder.embed(source);
    struct Scored {
        std::string word;
        double score;
    };
    std::vector<Scored> scored;
    scored.reserve(pool.words.size());
    for (const auto& w : pool.words)
        scored.push_back({w, cosine_distance(src, embedder.embed(masked.realized(w)))});
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        return a.score != b.score ? a.score < b.score : a.word < b.word;
    });

    double lo = scored.front().score, hi = scored.back().score;
    std::vector<std::vector<int>> bands(static_cast<size_t>(n));
    if (hi - lo <= 1e-12) {
        // Degenerate spread: single band, the draw below falls back to uniform.
        for (size_t i = 0; i < scored.size(); ++i) bands[0].push_back(static_cast<int>(i));
    } else {
        double width = (hi - lo) / n;
        for (size_t i = 0; i < scored.size(); ++i) {
            int b = std::min(n - 1, static_cast<int>((scored[i].score - lo) / width));
            bands[static_cast<size_t>(b)].push_back(static_cast<int>(i));
        }
    }

    std::vector<std::string> picked;
    auto draw_from = [&](std::vector<int>& band) {
        uint32_t k = rng.uniform_int(static_cast<uint32_t>(band.size()));
        picked.push_back(scored[static_cast<size_t>(band[k])].word);
        band.erase(band.begin() + k);
    };
    for (auto& band : bands) {
        if (static_cast<int>(picked.size()) == n) break;
        if (!band.empty()) draw_from(band);
    }
    while (static_cast<int>(picked.size()) < n) {
        // Top up from the fullest remaining band (ties -> lowest band index).
        size_t best = 0;
        for (size_t b = 1; b < bands.size(); ++b)
            if (bands[b].size() > bands[best].size()) best = b;
        draw_from(bands[best]);
    }
    return picked;
}

double gamma(const std::string& prompt_a, const std::string& prompt_b,
             const TextEmbedder& embedder) {
    return cosine_distance(embedder.embed(prompt_a), embedder.embed(prompt_b));
}

AugmentationSet augment(const std::string& caption, const Lexicon& lexicon,
                        const TextEmbedder& embedder, int n, bool soft, Rng& rng,
                        const MaskedLmAdapter* mlm) {
    if (n < 2) throw std::invalid_argument("augment: need at least 2 target prompts");
    MaskedPrompt masked = mask_token(caption, lexicon, rng);
    CandidatePool pool = build_pool(masked, lexicon, mlm);
    std::vector<std::string> words =
        soft ? sample_soft(pool, n, masked, embedder, rng) : sample_hard(pool, n, rng);

    AugmentationSet set;
    set.source = caption;
    for (const auto& w : words) set.targets.push_back(masked.realized(w));
    set.gamma.assign(static_cast<size_t>(n), std::vector<float>(static_cast<size_t>(n), 0.0f));
    std::vector<PromptEmbedding> emb;
    emb.reserve(set.targets.size());
    for (const auto& t : set.targets) emb.push_back(embedder.embed(t));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            float g = static_cast<float>(cosine_distance(emb[static_cast<size_t>(i)],
                                                         emb[static_cast<size_t>(j)]));
            set.gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] = g;
            set.gamma[static_cast<size_t>(j)][static_cast<size_t>(i)] = g;
        }
    return set;
}

} // namespace ledit
