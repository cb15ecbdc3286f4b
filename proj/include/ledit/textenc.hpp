#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ledit/lexicon.hpp"
#include "ledit/tensor.hpp"

namespace ledit {

struct PromptEmbedding {
    enum class Source { Conditioning, Reference };
    std::vector<float> v;
    Source source = Source::Conditioning;
};

// Abstract prompt embedder; the reference embedder and test stubs implement
// it. Implementations must be side-effect free per call.
class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual PromptEmbedding embed(const std::string& prompt) const = 0;
};

// Cosine distance (1 - cosine similarity) of two embeddings, clamped to
// [0,1]. Symmetric; 0 for identical prompts.
double cosine_distance(const PromptEmbedding& a, const PromptEmbedding& b);

// Frozen deterministic embedder standing in for a pretrained text tower.
// Each token's vector is a seeded-hash Gaussian plus smoothing toward its
// lexicon synonyms and away from its antonyms, so related words land closer
// than unrelated ones. No trainable state; identical across runs/machines.
class ReferenceEmbedder : public TextEmbedder {
public:
    explicit ReferenceEmbedder(const Lexicon& lexicon, int dim = 64);
    PromptEmbedding embed(const std::string& prompt) const override;

    // Persisted in checkpoints so evaluation numbers are comparable.
    const std::string& version_tag() const { return tag_; }
    int dim() const { return dim_; }

private:
    std::vector<float> token_vector(const std::string& token) const;
    const Lexicon* lexicon_;
    int dim_;
    std::string tag_;
};

// Trainable token-embedding table covering the lexicon vocabulary plus the
// mask sentinel, with a positional bias table for slot-eligible positions.
class ConditioningEncoder {
public:
    ConditioningEncoder(const Lexicon& lexicon, int dim, int max_len, uint64_t init_seed);

    // mean of token embeddings + (1/L) * sum of positional bias over
    // noun/adjective positions.
    PromptEmbedding encode(const std::string& prompt) const;

    // Accumulates d(loss)/d(table rows) for the prompt given d(loss)/d(output).
    void backward(const std::string& prompt, const std::vector<double>& dout,
                  std::vector<double>& dembed, std::vector<double>& dposbias) const;

    Tensor& embedding_table() { return table_; }
    Tensor& positional_bias() { return posbias_; }
    const Tensor& embedding_table() const { return table_; }
    const Tensor& positional_bias() const { return posbias_; }

    int dim() const { return dim_; }
    int max_len() const { return max_len_; }
    int vocab_size() const { return static_cast<int>(index_.size()); }
    int token_index(const std::string& token) const; // throws on OOV

private:
    std::vector<int> token_indices(const std::string& prompt) const;
    std::vector<bool> eligibility(const std::string& prompt) const;

    const Lexicon* lexicon_;
    int dim_;
    int max_len_;
    std::unordered_map<std::string, int> index_;
    Tensor table_;   // {V, dim}
    Tensor posbias_; // {max_len, dim}
};

} // namespace ledit
