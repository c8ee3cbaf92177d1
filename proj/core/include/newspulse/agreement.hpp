#pragma once

#include <optional>
#include <string>
#include <vector>

namespace newspulse {

// items x annotators nominal label table; std::nullopt marks a missing
// rating. Items with fewer than two ratings are not pairable and drop
// out of the computation.
using LabelTable = std::vector<std::vector<std::optional<std::string>>>;

struct AlphaResult {
    double alpha = 1.0;
    bool no_variation = false; // all pairable labels identical; alpha = 1 by convention
};

// Krippendorff's alpha at the nominal level via the coincidence-matrix
// formulation: alpha = 1 - D_o / D_e. Requires >= 2 annotators and
// >= 2 items.
AlphaResult krippendorff_alpha(const LabelTable& table);

// Loads a `topic,annotator,label` CSV into a table (topics become items).
LabelTable load_label_table(const std::string& path, std::vector<int>* topic_ids = nullptr,
                            std::vector<std::string>* annotators = nullptr);

struct ResolvedLabels {
    std::vector<int> topic_ids;
    std::vector<std::string> final_labels; // aligned with topic_ids
    AlphaResult alpha;
    std::vector<int> unresolved; // ties without a "final" annotator
};

// Majority vote per topic; an annotator literally named "final" wins
// outright (the post-discussion label). Ties stay unresolved.
ResolvedLabels resolve_topic_labels(const LabelTable& table, const std::vector<int>& topic_ids,
                                    const std::vector<std::string>& annotators);

} // namespace newspulse
