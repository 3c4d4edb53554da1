#include "boids/text_io.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace boids {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
    double v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("expected a number for " + std::string(what) + ", got '" +
                                    std::string(text) + "'");
    }
    return v;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    std::int64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("expected an integer for " + std::string(what) + ", got '" +
                                    std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("expected an unsigned integer for " + std::string(what) +
                                    ", got '" + std::string(text) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos) {
            out.emplace_back(trim(s.substr(start)));
            break;
        }
        out.emplace_back(trim(s.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

KeyValues KeyValues::parse(const std::string& text) {
    KeyValues kv;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line(text.data() + pos,
                              (eol == std::string::npos ? text.size() : eol) - pos);
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 'key = value', got '" + std::string(line) +
                                        "'");
        }
        Item item;
        item.key = std::string(trim(line.substr(0, eq)));
        item.value = std::string(trim(line.substr(eq + 1)));
        if (item.key.empty()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
        }
        for (const auto& existing : kv.items_) {
            if (existing.key == item.key) {
                throw std::invalid_argument("duplicate key '" + item.key + "'");
            }
        }
        kv.items_.push_back(std::move(item));
    }
    return kv;
}

KeyValues::Item* KeyValues::find(const std::string& key) {
    const auto it = std::find_if(items_.begin(), items_.end(),
                                 [&](const Item& i) { return i.key == key; });
    return it == items_.end() ? nullptr : &*it;
}

bool KeyValues::has(const std::string& key) const {
    return std::any_of(items_.begin(), items_.end(),
                       [&](const Item& i) { return i.key == key; });
}

std::string KeyValues::require(const std::string& key) {
    Item* item = find(key);
    if (item == nullptr) throw std::invalid_argument("missing required key '" + key + "'");
    item->used = true;
    return item->value;
}

std::string KeyValues::take_or(const std::string& key, const std::string& fallback) {
    Item* item = find(key);
    if (item == nullptr) return fallback;
    item->used = true;
    return item->value;
}

double KeyValues::require_double(const std::string& key) {
    return parse_double(require(key), key);
}

double KeyValues::take_double_or(const std::string& key, double fallback) {
    Item* item = find(key);
    if (item == nullptr) return fallback;
    item->used = true;
    return parse_double(item->value, key);
}

std::int64_t KeyValues::take_int_or(const std::string& key, std::int64_t fallback) {
    Item* item = find(key);
    if (item == nullptr) return fallback;
    item->used = true;
    return parse_int(item->value, key);
}

std::uint64_t KeyValues::take_uint_or(const std::string& key, std::uint64_t fallback) {
    Item* item = find(key);
    if (item == nullptr) return fallback;
    item->used = true;
    return parse_uint(item->value, key);
}

void KeyValues::finish() const {
    std::string unknown;
    for (const auto& item : items_) {
        if (!item.used) {
            if (!unknown.empty()) unknown += ", ";
            unknown += item.key;
        }
    }
    if (!unknown.empty()) {
        throw std::invalid_argument("unknown key(s): " + unknown);
    }
}

}  // namespace boids
