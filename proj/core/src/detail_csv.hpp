#ifndef FRNN_DETAIL_CSV_HPP
#define FRNN_DETAIL_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

#include "frnn/errors.hpp"

namespace frnn::detail {

/// RFC-4180 records: quoted fields may contain commas, doubled quotes and
/// line breaks. Returns one vector of fields per record; a single trailing
/// newline does not produce a phantom record.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
    // Strip a UTF-8 byte order mark.
    if (text.size() >= 3 && text.substr(0, 3) == "\xef\xbb\xbf") text.remove_prefix(3);

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field_started && field.empty()) {
                    quoted = true;
                    field_started = true;
                } else {
                    field.push_back(c);
                }
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_record();
                break;
            case '\n': end_record(); break;
            default:
                field.push_back(c);
                field_started = true;
                break;
        }
    }
    if (quoted) throw ParseError("unterminated quoted CSV field");
    if (field_started || !field.empty() || !record.empty()) end_record();
    while (!records.empty() && records.back().size() == 1 && records.back()[0].empty()) {
        records.pop_back();
    }
    return records;
}

inline bool csv_needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void append_csv_field(std::string& out, std::string_view field) {
    if (!csv_needs_quoting(field)) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

} // namespace frnn::detail

#endif
