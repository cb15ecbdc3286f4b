#include "ledit/textenc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ledit/common.hpp"
#include "ledit/rng.hpp"

namespace ledit {

double cosine_distance(const PromptEmbedding& a, const PromptEmbedding& b) {
    if (a.v.size() != b.v.size())
        throw std::invalid_argument("cosine_distance: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        dot += static_cast<double>(a.v[i]) * b.v[i];
        na += static_cast<double>(a.v[i]) * a.v[i];
        nb += static_cast<double>(b.v[i]) * b.v[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    double d = 1.0 - dot / std::sqrt(na * nb);
    return std::clamp(d, 0.0, 1.0);
}

namespace {

uint64_t fnv1a(const std::string& s, uint64_t seed) {
    uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

constexpr uint64_t kHashSalt = 0x9d2c5680u;

} // namespace

ReferenceEmbedder::ReferenceEmbedder(const Lexicon& lexicon, int dim)
    : lexicon_(&lexicon), dim_(dim) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "refembed-v1-d%d-%016llx", dim,
                  static_cast<unsigned long long>(lexicon.content_hash()));
    tag_ = buf;
}

std::vector<float> ReferenceEmbedder::token_vector(const std::string& token) const {
    auto raw = [this](const std::string& w) {
        Rng rng(fnv1a(w, kHashSalt));
        std::vector<float> v(static_cast<size_t>(dim_));
        for (auto& x : v) x = static_cast<float>(rng.normal());
        return v;
    };
    std::vector<float> v = raw(token);
    if (lexicon_->contains(token)) {
        const LexiconEntry& e = lexicon_->entry(token);
        auto mix = [&](const std::vector<std::string>& rel, float weight) {
            if (rel.empty()) return;
            for (const auto& w : rel) {
                std::vector<float> u = raw(w);
                for (int i = 0; i < dim_; ++i)
                    v[static_cast<size_t>(i)] += weight * u[static_cast<size_t>(i)] /
                                                 static_cast<float>(rel.size());
            }
        };
        mix(e.synonyms, 0.5f);
        mix(e.antonyms, -0.25f);
    }
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    float inv = norm > 0.0 ? static_cast<float>(1.0 / std::sqrt(norm)) : 0.0f;
    for (auto& x : v) x *= inv;
    return v;
}

PromptEmbedding ReferenceEmbedder::embed(const std::string& prompt) const {
    std::vector<std::string> tokens = tokenize(prompt);
    PromptEmbedding out;
    out.source = PromptEmbedding::Source::Reference;
    out.v.assign(static_cast<size_t>(dim_), 0.0f);
    for (const auto& tok : tokens) {
        std::vector<float> tv = token_vector(tok);
        for (int i = 0; i < dim_; ++i) out.v[static_cast<size_t>(i)] += tv[static_cast<size_t>(i)];
    }
    double norm = 0.0;
    for (float x : out.v) norm += static_cast<double>(x) * x;
    if (norm > 0.0) {
        float inv = static_cast<float>(1.0 / std::sqrt(norm));
        for (auto& x : out.v) x *= inv;
    }
    return out;
}

ConditioningEncoder::ConditioningEncoder(const Lexicon& lexicon, int dim, int max_len,
                                         uint64_t init_seed)
    : lexicon_(&lexicon), dim_(dim), max_len_(max_len) {
    std::vector<std::string> vocab = lexicon.vocabulary();
    vocab.push_back(kMaskToken);
    for (size_t i = 0; i < vocab.size(); ++i) index_[vocab[i]] = static_cast<int>(i);
    table_ = Tensor({static_cast<int>(vocab.size()), dim});
    posbias_ = Tensor({max_len, dim});
    Rng rng(mix_seed(init_seed, 0x7e47));
    table_.fill_normal(rng, 0.2f);
    posbias_.fill_normal(rng, 0.05f);
}

int ConditioningEncoder::token_index(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end())
        throw DataError("conditioning encoder: out-of-vocabulary token '" + token + "'");
    return it->second;
}

std::vector<int> ConditioningEncoder::token_indices(const std::string& prompt) const {
    std::vector<std::string> tokens = tokenize(prompt);
    if (tokens.empty()) throw std::invalid_argument("encode: empty prompt");
    if (static_cast<int>(tokens.size()) > max_len_)
        throw std::invalid_argument("encode: prompt longer than " + std::to_string(max_len_));
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(token_index(t));
    return ids;
}

std::vector<bool> ConditioningEncoder::eligibility(const std::string& prompt) const {
    std::vector<std::string> tokens = tokenize(prompt);
    std::vector<bool> e(tokens.size(), false);
    for (size_t i = 0; i < tokens.size(); ++i) e[i] = lexicon_->is_editable(tokens[i]);
    return e;
}

PromptEmbedding ConditioningEncoder::encode(const std::string& prompt) const {
    std::vector<int> ids = token_indices(prompt);
    std::vector<bool> elig = eligibility(prompt);
    PromptEmbedding out;
    out.source = PromptEmbedding::Source::Conditioning;
    out.v.assign(static_cast<size_t>(dim_), 0.0f);
    float invL = 1.0f / static_cast<float>(ids.size());
    for (size_t p = 0; p < ids.size(); ++p) {
        const float* row = table_.data() + static_cast<size_t>(ids[p]) * dim_;
        for (int i = 0; i < dim_; ++i) out.v[static_cast<size_t>(i)] += invL * row[i];
        if (elig[p]) {
            const float* bias = posbias_.data() + p * static_cast<size_t>(dim_);
            for (int i = 0; i < dim_; ++i) out.v[static_cast<size_t>(i)] += invL * bias[i];
        }
    }
    return out;
}

void ConditioningEncoder::backward(const std::string& prompt, const std::vector<double>& dout,
                                   std::vector<double>& dembed,
                                   std::vector<double>& dposbias) const {
    std::vector<int> ids = token_indices(prompt);
    std::vector<bool> elig = eligibility(prompt);
    double invL = 1.0 / static_cast<double>(ids.size());
    for (size_t p = 0; p < ids.size(); ++p) {
        double* row = dembed.data() + static_cast<size_t>(ids[p]) * dim_;
        for (int i = 0; i < dim_; ++i) row[i] += invL * dout[static_cast<size_t>(i)];
        if (elig[p]) {
            double* bias = dposbias.data() + p * static_cast<size_t>(dim_);
            for (int i = 0; i < dim_; ++i) bias[i] += invL * dout[static_cast<size_t>(i)];
        }
    }
}

} // namespace ledit
