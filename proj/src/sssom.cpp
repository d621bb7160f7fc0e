#include "crosswalk/sssom.hpp"

#include "crosswalk/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace crosswalk {

namespace {

constexpr std::string_view kMappingSetIdKey = "mapping_set_id";
constexpr std::string_view kCurieMapKey = "curie_map";

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        return std::string(s.substr(1, s.size() - 2));
    }
    return std::string(s);
}

[[noreturn]] void header_error(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::InvalidHeader, "line " + std::to_string(line) + ": " + what);
}

struct HeaderLine {
    std::size_t line_no;
    std::string_view text;
};

// "key: value" or "key:" -> (key, value). Returns false when there is no
// key separator.
bool split_key(std::string_view text, std::string_view& key, std::string_view& value) {
    std::size_t pos = 0;
    while ((pos = text.find(':', pos)) != std::string_view::npos) {
        if (pos + 1 == text.size() || text[pos + 1] == ' ') {
            key = trim(text.substr(0, pos));
            value = trim(text.substr(pos + 1));
            return !key.empty();
        }
        ++pos;
    }
    return false;
}

std::map<std::string, MetadataValue> parse_yaml_header(const std::vector<HeaderLine>& lines) {
    std::map<std::string, MetadataValue> out;
    std::string open_key;
    bool open_has_children = false;

    auto close_block = [&] {
        if (!open_key.empty() && !open_has_children) out[open_key] = std::string{};
        open_key.clear();
        open_has_children = false;
    };

    for (const auto& [line_no, raw] : lines) {
        const auto content = trim(raw);
        if (content.empty() || content.front() == '#') continue;
        const auto indent = raw.find_first_not_of(' ');
        if (raw[indent] == '\t') header_error(line_no, "tab indentation is not supported");

        if (indent == 0) {
            close_block();
            std::string_view key, value;
            if (!split_key(content, key, value)) header_error(line_no, "expected 'key: value'");
            std::string k(key);
            if (out.count(k)) header_error(line_no, "duplicate key '" + k + "'");
            if (value.empty()) {
                open_key = k;
                out[k] = std::string{};
            } else {
                out[k] = std::string(value);
            }
            continue;
        }

        if (open_key.empty()) header_error(line_no, "indented line outside of a block");
        auto& slot = out[open_key];
        if (content == "-" || content.substr(0, 2) == "- ") {
            if (open_has_children && !std::holds_alternative<MetadataList>(slot)) {
                header_error(line_no, "mixed list and map entries under '" + open_key + "'");
            }
            if (!open_has_children) slot = MetadataList{};
            std::get<MetadataList>(slot).emplace_back(trim(content.substr(1)));
        } else {
            if (open_has_children && !std::holds_alternative<MetadataMap>(slot)) {
                header_error(line_no, "mixed list and map entries under '" + open_key + "'");
            }
            if (!open_has_children) slot = MetadataMap{};
            std::string_view key, value;
            if (!split_key(content, key, value)) header_error(line_no, "expected 'key: value'");
            auto& map = std::get<MetadataMap>(slot);
            if (!map.emplace(std::string(key), std::string(value)).second) {
                header_error(line_no, "duplicate key '" + std::string(key) + "' under '" + open_key + "'");
            }
        }
        open_has_children = true;
    }
    close_block();
    return out;
}

Curie parse_curie_cell(std::string_view cell, std::string_view column, std::size_t line_no) {
    try {
        return parse_curie(cell);
    } catch (const Error& e) {
        throw Error(ErrorCode::Value,
                    "line " + std::to_string(line_no) + ", column " + std::string(column) + ": " + e.what());
    }
}

double parse_confidence(std::string_view cell, std::size_t line_no) {
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw Error(ErrorCode::Value,
                    "line " + std::to_string(line_no) + ": confidence '" + std::string(cell) + "' is not a number");
    }
    if (value < 0.0 || value > 1.0) {
        throw Error(ErrorCode::Value, "line " + std::to_string(line_no) + ": confidence " + std::string(cell) +
                                          " outside [0,1]");
    }
    return value;
}

void bind_cell(Mapping& m, std::string_view column, std::string_view cell, std::size_t line_no) {
    if (column == "subject_id") m.subject_id = parse_curie_cell(cell, column, line_no);
    else if (column == "predicate_id") m.predicate_id = parse_curie_cell(cell, column, line_no);
    else if (column == "object_id") m.object_id = parse_curie_cell(cell, column, line_no);
    else if (column == "subject_label") m.subject_label = std::string(cell);
    else if (column == "object_label") m.object_label = std::string(cell);
    else if (column == "mapping_justification") m.mapping_justification = parse_curie_cell(cell, column, line_no);
    else if (column == "confidence") m.confidence = parse_confidence(cell, line_no);
    else if (column == "author_id") m.author_id = std::string(cell);
    else if (column == "reviewer_id") m.reviewer_id = std::string(cell);
    else if (column == "mapping_tool") m.mapping_tool = std::string(cell);
    else if (column == "mapping_set_id") m.mapping_set_id = std::string(cell);
    else m.extensions.emplace(std::string(column), std::string(cell));
}

void write_metadata(std::string& out, const std::string& key, const MetadataValue& value) {
    if (const auto* scalar = std::get_if<std::string>(&value)) {
        out += "# " + key + ":";
        if (!scalar->empty()) out += " " + *scalar;
        out += '\n';
    } else if (const auto* list = std::get_if<MetadataList>(&value)) {
        out += "# " + key + ":\n";
        for (const auto& item : *list) {
            out += "#   -";
            if (!item.empty()) out += " " + item;
            out += '\n';
        }
    } else {
        out += "# " + key + ":\n";
        for (const auto& [sub, v] : std::get<MetadataMap>(value)) {
            out += "#   " + sub + ":";
            if (!v.empty()) out += " " + v;
            out += '\n';
        }
    }
}

bool has_control_chars(std::string_view s) {
    return s.find_first_of("\t\n\r") != std::string_view::npos;
}

} // namespace

bool is_known_column(std::string_view name) {
    return name == "mapping_set_id" ||
           std::find(kCanonicalColumns.begin(), kCanonicalColumns.end(), name) != kCanonicalColumns.end();
}

std::string format_confidence(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

MappingSet parse_mapping_file(std::string_view text) {
    const auto raw_lines = split(text, '\n');
    std::vector<HeaderLine> header;
    std::size_t i = 0;
    for (; i < raw_lines.size(); ++i) {
        auto line = strip_cr(raw_lines[i]);
        if (line.empty() || line.front() != '#') break;
        line.remove_prefix(1);
        if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        header.push_back({i + 1, line});
    }

    auto metadata = parse_yaml_header(header);
    MappingSet set;

    auto id_it = metadata.find(std::string(kMappingSetIdKey));
    if (id_it == metadata.end()) {
        throw Error(ErrorCode::InvalidHeader, "header is missing mapping_set_id");
    }
    const auto* id = std::get_if<std::string>(&id_it->second);
    if (!id || unquote(*id).empty()) {
        throw Error(ErrorCode::InvalidHeader, "mapping_set_id must be a non-empty scalar");
    }
    set.mapping_set_id = unquote(*id);
    metadata.erase(id_it);

    if (auto cm = metadata.find(std::string(kCurieMapKey)); cm != metadata.end()) {
        if (const auto* map = std::get_if<MetadataMap>(&cm->second)) {
            for (const auto& [prefix, base] : *map) {
                try {
                    set.curie_map.set(prefix, unquote(base));
                } catch (const Error& e) {
                    throw Error(ErrorCode::InvalidHeader, std::string("curie_map: ") + e.what());
                }
            }
        } else {
            const auto* scalar = std::get_if<std::string>(&cm->second);
            if (!scalar || !(scalar->empty() || *scalar == "{}")) {
                throw Error(ErrorCode::InvalidHeader, "curie_map must be a map of prefix: URI base");
            }
        }
        metadata.erase(cm);
    }
    set.other_metadata = std::move(metadata);

    // Column header: the first non-blank line after the comment block.
    while (i < raw_lines.size() && trim(strip_cr(raw_lines[i])).empty()) ++i;
    if (i == raw_lines.size()) {
        throw Error(ErrorCode::Schema, "missing TSV column header line");
    }
    const auto header_line_no = i + 1;
    const auto columns = split(strip_cr(raw_lines[i]), '\t');
    {
        std::set<std::string_view> seen;
        for (const auto& c : columns) {
            if (c.empty()) throw Error(ErrorCode::Schema, "line " + std::to_string(header_line_no) + ": empty column name");
            if (!seen.insert(c).second) {
                throw Error(ErrorCode::Schema, "duplicate column '" + std::string(c) + "'");
            }
        }
        for (std::string_view required : {"subject_id", "predicate_id", "object_id"}) {
            if (!seen.count(required)) {
                throw Error(ErrorCode::Schema, "missing required column '" + std::string(required) + "'");
            }
        }
    }
    ++i;

    for (; i < raw_lines.size(); ++i) {
        const auto line = strip_cr(raw_lines[i]);
        if (trim(line).empty()) continue;
        const auto line_no = i + 1;
        const auto cells = split(line, '\t');
        if (cells.size() != columns.size()) {
            throw Error(ErrorCode::RowArity, "line " + std::to_string(line_no) + ": expected " +
                                                 std::to_string(columns.size()) + " cells, found " +
                                                 std::to_string(cells.size()));
        }
        Mapping m;
        m.mapping_set_id = set.mapping_set_id;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (cells[c].empty()) {
                if (columns[c] == "subject_id" || columns[c] == "predicate_id" || columns[c] == "object_id") {
                    throw Error(ErrorCode::Value, "line " + std::to_string(line_no) + ": empty " +
                                                      std::string(columns[c]));
                }
                continue;
            }
            bind_cell(m, columns[c], cells[c], line_no);
        }
        set.mappings.push_back(std::move(m));
    }
    return set;
}

void write_mapping_set(std::ostream& stream, const MappingSet& set, std::span<const Mapping> rows) {
    std::string out;
    out += "# mapping_set_id: " + set.mapping_set_id + "\n";
    if (!set.curie_map.empty()) {
        out += "# curie_map:\n";
        for (const auto& [prefix, base] : set.curie_map.entries()) {
            out += "#   " + prefix + ": " + base + "\n";
        }
    }
    for (const auto& [key, value] : set.other_metadata) write_metadata(out, key, value);

    const bool set_id_column = std::any_of(rows.begin(), rows.end(), [&](const Mapping& m) {
        return m.mapping_set_id != set.mapping_set_id;
    });
    std::set<std::string> extension_columns;
    for (const auto& m : rows) {
        for (const auto& [k, v] : m.extensions) extension_columns.insert(k);
    }

    std::string header_row;
    for (auto c : kCanonicalColumns) {
        if (!header_row.empty()) header_row += '\t';
        header_row += c;
    }
    if (set_id_column) header_row += "\tmapping_set_id";
    for (const auto& c : extension_columns) header_row += "\t" + c;
    out += header_row + "\n";

    auto opt = [](const std::optional<std::string>& v) -> const std::string& {
        static const std::string empty;
        return v ? *v : empty;
    };
    // Rows are flushed in batches so large sets never sit in one string.
    constexpr std::size_t kFlushBytes = 1 << 20;
    for (const auto& m : rows) {
        out += m.subject_id.str();
        out += '\t' + opt(m.subject_label);
        out += '\t' + m.predicate_id.str();
        out += '\t' + m.object_id.str();
        out += '\t' + opt(m.object_label);
        out += '\t' + (m.mapping_justification ? m.mapping_justification->str() : std::string{});
        out += '\t' + (m.confidence ? format_confidence(*m.confidence) : std::string{});
        out += '\t' + opt(m.author_id);
        out += '\t' + opt(m.reviewer_id);
        out += '\t' + opt(m.mapping_tool);
        if (set_id_column) out += '\t' + (m.mapping_set_id == set.mapping_set_id ? std::string{} : m.mapping_set_id);
        for (const auto& c : extension_columns) {
            auto it = m.extensions.find(c);
            out += '\t';
            if (it != m.extensions.end()) out += it->second;
        }
        out += '\n';
        if (out.size() >= kFlushBytes) {
            stream << out;
            out.clear();
        }
    }
    stream << out;
}

std::string serialize_mapping_set(const MappingSet& set) {
    std::ostringstream out;
    write_mapping_set(out, set, set.mappings);
    return std::move(out).str();
}

std::vector<Violation> validate_mapping(const Mapping& m) {
    std::vector<Violation> out;
    auto check_curie = [&](const char* field, const Curie& c) {
        if (c.prefix.empty() || c.local_id.empty() || c.prefix.find(':') != std::string::npos) {
            out.push_back({field, "malformed-curie"});
        } else if (has_control_chars(c.prefix) || has_control_chars(c.local_id)) {
            out.push_back({field, "control-characters"});
        }
    };
    auto check_text = [&](const char* field, const std::optional<std::string>& v) {
        if (v && has_control_chars(*v)) out.push_back({field, "control-characters"});
    };

    check_curie("subject_id", m.subject_id);
    check_curie("predicate_id", m.predicate_id);
    check_curie("object_id", m.object_id);
    if (m.mapping_justification) check_curie("mapping_justification", *m.mapping_justification);
    if (m.confidence && !(*m.confidence >= 0.0 && *m.confidence <= 1.0)) {
        out.push_back({"confidence", "confidence-out-of-range"});
    }
    check_text("subject_label", m.subject_label);
    check_text("object_label", m.object_label);
    check_text("author_id", m.author_id);
    check_text("reviewer_id", m.reviewer_id);
    check_text("mapping_tool", m.mapping_tool);
    if (m.mapping_set_id.empty()) out.push_back({"mapping_set_id", "empty"});
    else if (has_control_chars(m.mapping_set_id)) out.push_back({"mapping_set_id", "control-characters"});
    for (const auto& [k, v] : m.extensions) {
        if (is_known_column(k) || k.empty() || has_control_chars(k)) out.push_back({k, "invalid-extension-column"});
        else if (v.empty()) out.push_back({k, "empty-extension-value"});
        else if (has_control_chars(v)) out.push_back({k, "control-characters"});
    }
    return out;
}

} // namespace crosswalk
