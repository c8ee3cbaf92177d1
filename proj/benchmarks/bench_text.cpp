#include <benchmark/benchmark.h>

#include "newspulse/classify.hpp"
#include "newspulse/csv.hpp"
#include "newspulse/html_text.hpp"
#include "newspulse/stemmer.hpp"

using namespace newspulse;

static void BM_ExtractText(benchmark::State& state) {
    std::string page = read_file(std::string(NEWSPULSE_FIXTURES) + "/corpus/pages/outlet_a/0.html");
    for (auto _ : state) {
        std::string text = extract_text(page);
        benchmark::DoNotOptimize(text);
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(page.size()));
}
BENCHMARK(BM_ExtractText);

static void BM_ClassifyText(benchmark::State& state) {
    KeywordFilter limited = KeywordFilter::limited();
    std::string text;
    for (int i = 0; i < 200; ++i)
        text += (i % 37 == 0) ? "coronavirus briefing continued " : "the council met on tuesday ";
    for (auto _ : state) {
        MatchResult r = classify_text(text, limited);
        benchmark::DoNotOptimize(r.match);
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(text.size()));
}
BENCHMARK(BM_ClassifyText);

static void BM_PorterStem(benchmark::State& state) {
    const char* words[] = {"relational", "masking", "distancing", "hopefulness",
                           "technology", "communities", "vaccination", "troubles"};
    size_t i = 0;
    for (auto _ : state) {
        std::string stem = porter_stem(words[i++ % 8]);
        benchmark::DoNotOptimize(stem);
    }
}
BENCHMARK(BM_PorterStem);

BENCHMARK_MAIN();
