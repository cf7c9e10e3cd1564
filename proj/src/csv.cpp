#include "csv.hpp"

#include <stdexcept>

namespace catglm::csv {

std::optional<std::vector<std::string>> Reader::next() {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    record_line_ = line_;

    // Strip a UTF-8 BOM on the very first record.
    if (line_ == 1 && in_.peek() == 0xEF) {
        char bom[3];
        in_.read(bom, 3);
        if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
            in_.seekg(-3, std::ios::cur);
        }
    }

    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (in_.peek() == '\n') in_.get();
            ++line_;
            fields.push_back(std::move(field));
            return fields;
        } else if (c == '\n') {
            ++line_;
            fields.push_back(std::move(field));
            return fields;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw std::runtime_error("unterminated quoted field starting on line " + std::to_string(record_line_));
    }
    if (!any) return std::nullopt;
    fields.push_back(std::move(field));
    return fields;
}

void write_field(std::ostream& out, const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

}  // namespace catglm::csv
