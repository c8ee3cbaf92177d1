#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "newspulse/store.hpp"

namespace newspulse {

// A keyword filter; terms are stored lowercase with Unicode dashes
// normalized. The limited filter is the hardcoded four-term robustness
// set; the full filter loads from a term-per-line file and is widened
// to contain the limited terms so the subset invariant holds.
class KeywordFilter {
public:
    static KeywordFilter limited();

    // File format: UTF-8, one lowercase term per line, '#' comment lines
    // ignored. Terms with a leading '#' or '@' (Twitter artifacts) are
    // rejected.
    static KeywordFilter load(const std::string& path, const std::string& name);

    static KeywordFilter from_terms(std::vector<std::string> terms, const std::string& name);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& terms() const { return terms_; }

    // True when every term of `other` is present here.
    bool contains_all(const KeywordFilter& other) const;

    // Adds any missing terms of `other` (used to enforce limited ⊆ full).
    void ensure_superset_of(const KeywordFilter& other);

private:
    std::string name_;
    std::vector<std::string> terms_;                 // original order, deduped
    std::vector<std::vector<std::string>> parts_;    // per term: hyphen/space-split parts

    void rebuild_parts();
    friend struct Matcher;
};

struct MatchResult {
    bool match = false;
    std::vector<std::string> hits; // each matched term once, filter order
};

// Token-boundary matching: text is lowercased, Unicode dashes become
// '-', tokens split on non-alphanumerics (internal hyphens split the
// token into parts). Single-part terms match whole parts; multi-part
// terms match consecutive parts; "covid" additionally matches tokens
// with a digit-led suffix ("covid19"), which keeps "covidien" out.
MatchResult classify_text(std::string_view text, const KeywordFilter& filter);

struct ReclassifyCounts {
    size_t total = 0;
    size_t full = 0;
    size_t limited = 0;
};

// Overwrites both flags on every stored article. Idempotent.
ReclassifyCounts reclassify_store(ArticleStore& store, const KeywordFilter& full,
                                  const KeywordFilter& limited);

} // namespace newspulse
