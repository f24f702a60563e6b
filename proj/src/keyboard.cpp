#include "taptrace/keyboard.hpp"

#include <set>
#include <stdexcept>

#include "taptrace/text.hpp"

namespace taptrace {

std::size_t KeyboardLayout::key_count() const {
    std::size_t n = 0;
    for (const auto& row : rows) n += row.size();
    return n;
}

const Key& KeyboardLayout::key_at_slot(std::size_t slot) const {
    for (const auto& row : rows) {
        if (slot < row.size()) return row[slot];
        slot -= row.size();
    }
    throw std::out_of_range("layout: slot index out of range");
}

Key& KeyboardLayout::key_at_slot(std::size_t slot) {
    return const_cast<Key&>(
        static_cast<const KeyboardLayout*>(this)->key_at_slot(slot));
}

std::vector<std::string> KeyboardLayout::labels() const {
    std::vector<std::string> out;
    out.reserve(key_count());
    for (const auto& row : rows) {
        for (const Key& k : row) out.push_back(k.label);
    }
    return out;
}

std::optional<std::size_t> KeyboardLayout::slot_of_label(
    std::string_view label) const {
    std::size_t slot = 0;
    for (const auto& row : rows) {
        for (const Key& k : row) {
            if (k.label == label) return slot;
            ++slot;
        }
    }
    return std::nullopt;
}

double KeyboardLayout::width() const {
    double w = 0.0;
    for (const auto& row : rows) {
        for (const Key& k : row) w = std::max(w, k.x + k.w);
    }
    return w;
}

double KeyboardLayout::height() const {
    double h = 0.0;
    for (const auto& row : rows) {
        for (const Key& k : row) h = std::max(h, k.y + k.h);
    }
    return h;
}

double KeyboardLayout::diagonal() const {
    return std::sqrt(width() * width() + height() * height());
}

const std::string& SubstitutionMap::at(const std::string& base_label) const {
    const auto it = mapping.find(base_label);
    if (it == mapping.end()) {
        throw std::out_of_range("substitution map: unknown label '" + base_label +
                                "'");
    }
    return it->second;
}

namespace {

int default_keycode(std::string_view label) {
    return label.empty() ? 0 : static_cast<unsigned char>(label.front());
}

}  // namespace

KeyboardLayout parse_layout(std::string_view text) {
    KeyboardLayout layout;
    bool saw_header = false;
    std::size_t line_no = 0;
    double next_y = 0.0;
    std::set<std::string> seen_labels;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto fail = [&](const std::string& what) -> std::runtime_error {
            return std::runtime_error("layout line " + std::to_string(line_no) +
                                      ": " + what);
        };
        if (!saw_header) {
            for (std::string_view tok : split(line, ' ')) {
                tok = trim(tok);
                if (tok.empty()) continue;
                const auto kv = split(tok, '=');
                if (kv.size() != 2) throw fail("bad header token '" + std::string(tok) + "'");
                const double value = parse_double(kv[1]);
                if (kv[0] == "keyWidth") {
                    layout.key_width = value;
                } else if (kv[0] == "keyHeight") {
                    layout.key_height = value;
                } else if (kv[0] == "horizontalGap") {
                    layout.horizontal_gap = value;
                } else if (kv[0] == "verticalGap") {
                    layout.vertical_gap = value;
                } else {
                    throw fail("unknown header attribute '" + std::string(kv[0]) + "'");
                }
            }
            if (layout.key_width <= 0.0 || layout.key_height <= 0.0) {
                throw fail("keyWidth and keyHeight must be positive");
            }
            if (layout.horizontal_gap < 0.0 || layout.vertical_gap < 0.0) {
                throw fail("gaps must be non-negative");
            }
            saw_header = true;
            continue;
        }
        std::vector<Key> row;
        double row_key_width = layout.key_width;
        double next_x = 0.0;
        for (std::string_view tok : split(line, ' ')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            if (tok.rfind("rowKeyWidth=", 0) == 0) {
                row_key_width = parse_double(tok.substr(12));
                if (row_key_width <= 0.0) throw fail("rowKeyWidth must be positive");
                continue;
            }
            Key key;
            const std::size_t colon = tok.rfind(':');
            if (colon != std::string_view::npos && colon + 1 < tok.size()) {
                key.label = std::string(tok.substr(0, colon));
                key.keycode = static_cast<int>(parse_int64(tok.substr(colon + 1)));
            } else {
                key.label = std::string(tok);
                key.keycode = default_keycode(key.label);
            }
            if (key.label.empty()) throw fail("empty key label");
            if (!seen_labels.insert(key.label).second) {
                throw fail("duplicate key label '" + key.label + "'");
            }
            key.x = next_x;
            key.y = next_y;
            key.w = row_key_width;
            key.h = layout.key_height;
            next_x += row_key_width + layout.horizontal_gap;
            row.push_back(std::move(key));
        }
        if (row.empty()) throw fail("row with no keys");
        next_y += layout.key_height + layout.vertical_gap;
        layout.rows.push_back(std::move(row));
    }
    if (!saw_header) throw std::runtime_error("layout: missing header line");
    if (layout.rows.empty()) throw std::runtime_error("layout: no key rows");
    return layout;
}

KeyboardLayout load_layout(const std::string& path) {
    return parse_layout(read_file(path));
}

std::string layout_to_text(const KeyboardLayout& layout) {
    std::string out = "keyWidth=" + format_double(layout.key_width) +
                      " keyHeight=" + format_double(layout.key_height) +
                      " horizontalGap=" + format_double(layout.horizontal_gap) +
                      " verticalGap=" + format_double(layout.vertical_gap) + "\n";
    for (const auto& row : layout.rows) {
        bool first = true;
        const double row_width = row.empty() ? layout.key_width : row.front().w;
        if (row_width != layout.key_width) {
            out += "rowKeyWidth=" + format_double(row_width);
            first = false;
        }
        for (const Key& k : row) {
            if (!first) out += ' ';
            first = false;
            out += k.label;
            out += ':';
            out += std::to_string(k.keycode);
        }
        out += '\n';
    }
    return out;
}

std::optional<Key> hit_test(const KeyboardLayout& layout, double x, double y) {
    for (const auto& row : layout.rows) {
        for (const Key& k : row) {
            if (x >= k.x && x < k.x + k.w && y >= k.y && y < k.y + k.h) {
                return k;
            }
        }
    }
    return std::nullopt;
}

SubstitutionMap substitution_map(const KeyboardLayout& base,
                                 const KeyboardLayout& shuffled) {
    const std::size_t n = base.key_count();
    if (n != shuffled.key_count()) {
        throw std::runtime_error("substitution_map: key counts differ");
    }
    std::multiset<std::string> base_labels, shuffled_labels;
    for (std::size_t slot = 0; slot < n; ++slot) {
        const Key& a = base.key_at_slot(slot);
        const Key& b = shuffled.key_at_slot(slot);
        if (a.x != b.x || a.y != b.y || a.w != b.w || a.h != b.h) {
            throw std::runtime_error("substitution_map: slot geometry differs at slot " +
                                     std::to_string(slot));
        }
        base_labels.insert(a.label);
        shuffled_labels.insert(b.label);
    }
    if (base_labels != shuffled_labels) {
        throw std::runtime_error("substitution_map: label sets differ");
    }
    SubstitutionMap map;
    for (std::size_t slot = 0; slot < n; ++slot) {
        map.mapping[base.key_at_slot(slot).label] =
            shuffled.key_at_slot(slot).label;
    }
    return map;
}

SubstitutionMap compose(const SubstitutionMap& first,
                        const SubstitutionMap& second) {
    SubstitutionMap out;
    for (const auto& [base_label, mid_label] : first.mapping) {
        out.mapping[base_label] = second.at(mid_label);
    }
    return out;
}

}  // namespace taptrace
