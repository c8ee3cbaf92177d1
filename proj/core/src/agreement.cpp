#include "newspulse/agreement.hpp"

#include <map>
#include <set>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"

namespace newspulse {

AlphaResult krippendorff_alpha(const LabelTable& table) {
    if (table.size() < 2) throw Error("krippendorff_alpha: need >= 2 items");
    size_t annotators = 0;
    for (const auto& row : table) annotators = std::max(annotators, row.size());
    if (annotators < 2) throw Error("krippendorff_alpha: need >= 2 annotators");

    // Category indexing.
    std::map<std::string, int> category;
    for (const auto& row : table)
        for (const auto& cell : row)
            if (cell) category.emplace(*cell, 0);
    int next = 0;
    for (auto& [label, id] : category) id = next++;
    const int c = next;
    if (c == 0) throw Error("krippendorff_alpha: empty table");

    // Coincidence matrix: each pairable item with m ratings contributes
    // every ordered pair of its ratings with weight 1/(m-1).
    std::vector<std::vector<double>> coincidence(c, std::vector<double>(c, 0.0));
    double n_total = 0;
    for (const auto& row : table) {
        std::vector<int> vals;
        for (const auto& cell : row)
            if (cell) vals.push_back(category[*cell]);
        const size_t m = vals.size();
        if (m < 2) continue;
        double w = 1.0 / double(m - 1);
        for (size_t a = 0; a < m; ++a)
            for (size_t b = 0; b < m; ++b)
                if (a != b) coincidence[vals[a]][vals[b]] += w;
        n_total += double(m);
    }
    if (n_total < 2) throw Error("krippendorff_alpha: no pairable items");

    std::vector<double> margin(c, 0.0);
    double diag = 0;
    for (int i = 0; i < c; ++i) {
        for (int k = 0; k < c; ++k) margin[i] += coincidence[i][k];
        diag += coincidence[i][i];
    }

    double observed_disagreement = 1.0 - diag / n_total;
    double expected_match = 0;
    for (int i = 0; i < c; ++i) expected_match += margin[i] * (margin[i] - 1.0);
    double expected_disagreement = 1.0 - expected_match / (n_total * (n_total - 1.0));

    AlphaResult result;
    if (expected_disagreement <= 0) {
        result.alpha = 1.0;
        result.no_variation = true;
        return result;
    }
    result.alpha = 1.0 - observed_disagreement / expected_disagreement;
    return result;
}

LabelTable load_label_table(const std::string& path, std::vector<int>* topic_ids,
                            std::vector<std::string>* annotators_out) {
    std::map<int, std::map<std::string, std::string>> by_topic;
    std::set<std::string> annotator_names;
    for_each_csv_row(path, {"topic", "annotator", "label"}, [&](const auto& row, size_t line) {
        int topic = 0;
        try {
            topic = std::stoi(std::string(row.at("topic")));
        } catch (const std::exception&) {
            throw ParseError(path + " line " + std::to_string(line) + ": bad topic index");
        }
        std::string annotator(row.at("annotator"));
        by_topic[topic][annotator] = std::string(row.at("label"));
        annotator_names.insert(annotator);
    });

    std::vector<std::string> annotators(annotator_names.begin(), annotator_names.end());
    LabelTable table;
    for (const auto& [topic, labels] : by_topic) {
        std::vector<std::optional<std::string>> row(annotators.size());
        for (size_t a = 0; a < annotators.size(); ++a) {
            auto it = labels.find(annotators[a]);
            if (it != labels.end()) row[a] = it->second;
        }
        table.push_back(std::move(row));
        if (topic_ids) topic_ids->push_back(topic);
    }
    if (annotators_out) *annotators_out = annotators;
    return table;
}

ResolvedLabels resolve_topic_labels(const LabelTable& table, const std::vector<int>& topic_ids,
                                    const std::vector<std::string>& annotators) {
    if (table.size() != topic_ids.size()) throw Error("resolve_topic_labels: topic ids per row");

    ResolvedLabels out;
    out.topic_ids = topic_ids;
    out.final_labels.resize(table.size());

    // Agreement is computed over the regular annotators only.
    size_t final_idx = annotators.size();
    for (size_t a = 0; a < annotators.size(); ++a)
        if (annotators[a] == "final") final_idx = a;
    LabelTable without_final;
    for (const auto& row : table) {
        std::vector<std::optional<std::string>> r;
        for (size_t a = 0; a < row.size(); ++a)
            if (a != final_idx) r.push_back(row[a]);
        without_final.push_back(std::move(r));
    }
    out.alpha = krippendorff_alpha(without_final);

    for (size_t i = 0; i < table.size(); ++i) {
        if (final_idx < annotators.size() && table[i][final_idx]) {
            out.final_labels[i] = *table[i][final_idx];
            continue;
        }
        std::map<std::string, int> votes;
        for (size_t a = 0; a < table[i].size(); ++a) {
            if (a == final_idx || !table[i][a]) continue;
            ++votes[*table[i][a]];
        }
        std::string best;
        int best_count = 0;
        bool tie = false;
        for (const auto& [label, count] : votes) {
            if (count > best_count) {
                best = label;
                best_count = count;
                tie = false;
            } else if (count == best_count) {
                tie = true;
            }
        }
        if (tie || best.empty()) {
            out.unresolved.push_back(topic_ids[i]);
        } else {
            out.final_labels[i] = best;
        }
    }
    return out;
}

} // namespace newspulse
