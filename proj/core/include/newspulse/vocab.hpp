#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace newspulse {

struct Vocabulary {
    std::vector<std::string> terms;  // unique, sorted, stemmed
    std::vector<int> doc_freq;       // aligned with terms

    int term_id(std::string_view term) const; // -1 if absent
    int size() const { return int(terms.size()); }
};

struct DocTerms {
    // (term_id, count) pairs sorted by term_id.
    std::vector<std::pair<int, int>> counts;
    long long total = 0;
};

struct CorpusMatrix {
    Vocabulary vocab;
    std::vector<DocTerms> docs;       // aligned with the input documents
    std::vector<char> empty_doc;      // flagged: no retained tokens
};

struct VocabOptions {
    int min_df = 5;           // drop terms in fewer documents
    size_t min_token_len = 3;
    bool stem = true;
    std::unordered_set<std::string> stopwords;
};

std::unordered_set<std::string> load_stopwords(const std::string& path);

// Lowercases, strips punctuation, drops digit-only and short tokens,
// removes stopwords, Porter-stems, then drops terms under min_df.
// Throws EmptyVocabulary when nothing survives.
CorpusMatrix build_vocab(const std::vector<std::string>& docs, const VocabOptions& options = {});

} // namespace newspulse
