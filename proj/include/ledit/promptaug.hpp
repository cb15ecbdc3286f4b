#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ledit/lexicon.hpp"
#include "ledit/rng.hpp"
#include "ledit/textenc.hpp"

namespace ledit {

struct MaskedPrompt {
    std::vector<std::string> tokens; // tokens[slot_index] == kMaskToken
    int slot_index = 0;
    std::string original_word;
    Pos pos = Pos::Noun;

    std::string realized(const std::string& replacement) const;
};

enum class CandidateSource { Mlm, Synonym, Antonym, Cohyponym };

struct CandidatePool {
    std::vector<std::string> words;
    std::vector<CandidateSource> sources; // parallel to words
};

struct AugmentationSet {
    std::string source;
    std::vector<std::string> targets;    // y_1..y_N, one-token variants
    std::vector<std::vector<float>> gamma; // N x N pairwise prompt distances
};

// Masked-LM adapter contract: (masked tokens, slot) -> ranked proposals.
// Must be side-effect free per call.
class MaskedLmAdapter {
public:
    virtual ~MaskedLmAdapter() = default;
    virtual std::vector<std::string> propose(const std::vector<std::string>& tokens,
                                             int slot_index) const = 0;
};

// Table-driven deterministic stub: returns a fixed proposal list regardless
// of context. Useful for tests and offline runs.
class TableMlmAdapter : public MaskedLmAdapter {
public:
    explicit TableMlmAdapter(std::vector<std::string> proposals)
        : proposals_(std::move(proposals)) {}
    std::vector<std::string> propose(const std::vector<std::string>&, int) const override {
        return proposals_;
    }

private:
    std::vector<std::string> proposals_;
};

// Masks one uniformly chosen noun/adjective. Throws NoEditableTokenError
// when the caption has none.
MaskedPrompt mask_token(const std::string& caption, const Lexicon& lexicon, Rng& rng);

// Union of adapter proposals (if any) and lexicon relations, deduplicated,
// original word removed. Throws AugmentationUnavailableError when empty.
CandidatePool build_pool(const MaskedPrompt& masked, const Lexicon& lexicon,
                         const MaskedLmAdapter* mlm = nullptr);

// N distinct words uniformly without replacement.
std::vector<std::string> sample_hard(const CandidatePool& pool, int n, Rng& rng);

// Stratified draw: candidates are scored by prompt distance to the source,
// partitioned into N equal-width bands, one pick per non-empty band, topped
// up from the largest bands. Output set is invariant to pool order.
std::vector<std::string> sample_soft(const CandidatePool& pool, int n,
                                     const MaskedPrompt& masked, const TextEmbedder& embedder,
                                     Rng& rng);

// Prompt similarity weight: cosine distance of embeddings, in [0,1].
double gamma(const std::string& prompt_a, const std::string& prompt_b,
             const TextEmbedder& embedder);

// Full augmentation: mask, pool, draw (hard or soft), realize targets,
// fill the pairwise gamma matrix.
AugmentationSet augment(const std::string& caption, const Lexicon& lexicon,
                        const TextEmbedder& embedder, int n, bool soft, Rng& rng,
                        const MaskedLmAdapter* mlm = nullptr);

} // namespace ledit
