#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taptrace/rng.hpp"

namespace taptrace {

struct Key {
    std::string label;
    int keycode = 0;
    double x = 0.0;  // top-left, pixels
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double center_x() const { return x + w / 2.0; }
    double center_y() const { return y + h / 2.0; }

    bool operator==(const Key&) const = default;
};

/// Rows of keys with absolute geometry computed from the declared default
/// sizes and gaps. Slot indices are row-major over rows.
struct KeyboardLayout {
    double key_width = 0.0;
    double key_height = 0.0;
    double horizontal_gap = 0.0;
    double vertical_gap = 0.0;
    std::vector<std::vector<Key>> rows;

    std::size_t key_count() const;
    const Key& key_at_slot(std::size_t slot) const;
    Key& key_at_slot(std::size_t slot);
    std::vector<std::string> labels() const;  // row-major slot order
    std::optional<std::size_t> slot_of_label(std::string_view label) const;
    double width() const;
    double height() const;
    double diagonal() const;

    bool operator==(const KeyboardLayout&) const = default;
};

/// Bijection from a base-layout label to the label occupying that key's
/// geometric slot after a shuffle.
struct SubstitutionMap {
    std::map<std::string, std::string> mapping;

    const std::string& at(const std::string& base_label) const;
    bool operator==(const SubstitutionMap&) const = default;
};

// Layout file format:
//   keyWidth=<px> keyHeight=<px> horizontalGap=<px> verticalGap=<px>
//   <label>[:keycode] <label>[:keycode] ...        (one line per row)
// A row may start with rowKeyWidth=<px> to override the key width for that
// row. Keycodes default to the Unicode code point of the label's first byte.
KeyboardLayout parse_layout(std::string_view text);
KeyboardLayout load_layout(const std::string& path);
std::string layout_to_text(const KeyboardLayout& layout);

/// The unique key whose rectangle [x, x+w) x [y, y+h) contains the point;
/// nullopt in gaps and outside the keyboard.
std::optional<Key> hit_test(const KeyboardLayout& layout, double x, double y);

/// Fisher-Yates over slot contents: geometry stays fixed, (label, keycode)
/// pairs move. Draws j in [i, n-1] inclusive for i = 0..n-2, consuming
/// exactly n-1 draws.
template <IndexSource R>
KeyboardLayout shuffle_layout(const KeyboardLayout& layout, R& rng) {
    KeyboardLayout out = layout;
    const std::size_t n = out.key_count();
    if (n < 2) return out;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = rng.uniform_index(i, n - 1);
        Key& a = out.key_at_slot(i);
        Key& b = out.key_at_slot(j);
        std::swap(a.label, b.label);
        std::swap(a.keycode, b.keycode);
    }
    return out;
}

/// Fisher-Yates restricted to nearby slots: step i may swap slot i only with
/// slots at center distance <= radius. radius 0 is the identity; radius >=
/// the layout diagonal consumes and maps draws exactly like shuffle_layout.
template <IndexSource R>
KeyboardLayout proximity_shuffle(const KeyboardLayout& layout, double radius,
                                 R& rng) {
    KeyboardLayout out = layout;
    const std::size_t n = out.key_count();
    if (n < 2) return out;
    std::vector<double> cx(n), cy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Key& k = out.key_at_slot(i);
        cx[i] = k.center_x();
        cy[i] = k.center_y();
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        candidates.clear();
        for (std::size_t k = i; k < n; ++k) {
            const double dx = cx[k] - cx[i];
            const double dy = cy[k] - cy[i];
            if (std::sqrt(dx * dx + dy * dy) <= radius) candidates.push_back(k);
        }
        const std::size_t j = candidates[rng.uniform_index(0, candidates.size() - 1)];
        Key& a = out.key_at_slot(i);
        Key& b = out.key_at_slot(j);
        std::swap(a.label, b.label);
        std::swap(a.keycode, b.keycode);
    }
    return out;
}

/// Maps each base label to the label occupying its slot in `shuffled`.
/// Requires identical slot geometry and label multiset.
SubstitutionMap substitution_map(const KeyboardLayout& base,
                                 const KeyboardLayout& shuffled);

/// compose(ab, bc): base->s1 followed by s1->s2, giving base->s2.
SubstitutionMap compose(const SubstitutionMap& first,
                        const SubstitutionMap& second);

}  // namespace taptrace
