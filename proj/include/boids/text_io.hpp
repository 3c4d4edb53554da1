#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace boids {

// Shortest round-trip decimal form; parsing it back recovers the exact
// double, which keeps persisted artifacts bit-stable under re-aggregation.
std::string format_double(double v);

double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
std::uint64_t parse_uint(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Flat "key = value" dialect with '#' comments. Every key must be consumed
// exactly once; leftovers are reported as unknown keys so config typos fail
// loudly instead of being ignored.
class KeyValues {
public:
    static KeyValues parse(const std::string& text);

    bool has(const std::string& key) const;

    // Consume a key. The require variant throws when the key is missing.
    std::string require(const std::string& key);
    std::string take_or(const std::string& key, const std::string& fallback);

    double require_double(const std::string& key);
    double take_double_or(const std::string& key, double fallback);
    std::int64_t take_int_or(const std::string& key, std::int64_t fallback);
    std::uint64_t take_uint_or(const std::string& key, std::uint64_t fallback);

    // Throws listing every unconsumed key.
    void finish() const;

private:
    struct Item {
        std::string key;
        std::string value;
        bool used = false;
    };
    std::vector<Item> items_;

    Item* find(const std::string& key);
};

}  // namespace boids
