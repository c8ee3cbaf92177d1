#include "newspulse/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/stemmer.hpp"
#include "newspulse/textnorm.hpp"

namespace newspulse {

int Vocabulary::term_id(std::string_view term) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term) return -1;
    return int(it - terms.begin());
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::unordered_set<std::string> out;
    std::string content = read_file(path);
    size_t pos = 0;
    while (pos <= content.size()) {
        size_t nl = content.find('\n', pos);
        std::string word = content.substr(pos, (nl == std::string::npos ? content.size() : nl) - pos);
        while (!word.empty() && (word.back() == '\r' || word.back() == ' ')) word.pop_back();
        if (!word.empty() && word[0] != '#') out.insert(word);
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return out;
}

namespace {

bool digits_only(std::string_view tok) {
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

CorpusMatrix build_vocab(const std::vector<std::string>& docs, const VocabOptions& options) {
    // First pass: stem streams per document.
    std::vector<std::vector<std::string>> stemmed(docs.size());
    std::map<std::string, int> df;
    for (size_t d = 0; d < docs.size(); ++d) {
        std::string norm = normalize_for_match(docs[d]);
        std::map<std::string, bool> seen_here;
        for (const auto& tok : word_tokens(norm)) {
            if (tok.size() < options.min_token_len) continue;
            if (digits_only(tok)) continue;
            if (options.stopwords.count(tok)) continue;
            std::string term = options.stem ? porter_stem(tok) : tok;
            if (term.size() < options.min_token_len) continue;
            if (options.stopwords.count(term)) continue;
            stemmed[d].push_back(term);
            if (!seen_here.count(term)) {
                seen_here[term] = true;
                ++df[term];
            }
        }
    }

    CorpusMatrix out;
    for (const auto& [term, freq] : df) {
        if (freq >= options.min_df) {
            out.vocab.terms.push_back(term);
            out.vocab.doc_freq.push_back(freq);
        }
    }
    if (out.vocab.terms.empty()) throw EmptyVocabulary("no terms meet min_df=" + std::to_string(options.min_df));

    out.docs.resize(docs.size());
    out.empty_doc.assign(docs.size(), 0);
    for (size_t d = 0; d < docs.size(); ++d) {
        std::map<int, int> counts;
        for (const auto& term : stemmed[d]) {
            int id = out.vocab.term_id(term);
            if (id >= 0) ++counts[id];
        }
        DocTerms& doc = out.docs[d];
        for (const auto& [id, count] : counts) {
            doc.counts.emplace_back(id, count);
            doc.total += count;
        }
        if (doc.total == 0) out.empty_doc[d] = 1;
    }
    return out;
}

} // namespace newspulse
