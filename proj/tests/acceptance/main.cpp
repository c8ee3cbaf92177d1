#include "acceptance/harness.hpp"

int main() {
    acceptance::Registry registry;
    acceptance::register_glm(registry);
    acceptance::register_topics(registry);
    acceptance::register_data(registry);
    acceptance::register_pipeline(registry);
    int failures = registry.run();
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
