#pragma once

#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// One pass/fail line per criterion; a criterion body throws (with a
// reason) to fail and may call skip() when its inputs are absent.
namespace acceptance {

struct Skip : std::runtime_error {
    explicit Skip(const std::string& why) : std::runtime_error(why) {}
};

[[noreturn]] inline void skip(const std::string& why) { throw Skip(why); }

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

struct Registry {
    struct Entry {
        int number;
        std::string title;
        std::function<void()> body;
    };
    std::vector<Entry> entries;

    void add(int number, std::string title, std::function<void()> body) {
        entries.push_back({number, std::move(title), std::move(body)});
    }

    int run() {
        int failures = 0;
        for (const auto& entry : entries) {
            try {
                entry.body();
                std::printf("PASS criterion %d: %s\n", entry.number, entry.title.c_str());
            } catch (const Skip& s) {
                std::printf("SKIP criterion %d: %s (%s)\n", entry.number, entry.title.c_str(),
                            s.what());
            } catch (const std::exception& e) {
                std::printf("FAIL criterion %d: %s -- %s\n", entry.number, entry.title.c_str(),
                            e.what());
                ++failures;
            }
            std::fflush(stdout);
        }
        return failures;
    }
};

void register_glm(Registry& r);      // criteria 1-4
void register_topics(Registry& r);   // criteria 5-7
void register_data(Registry& r);     // criteria 8-10
void register_pipeline(Registry& r); // criteria 11-12

} // namespace acceptance
