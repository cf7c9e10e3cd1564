#pragma once

// Minimal RFC-4180 reader/writer: comma separated, double-quote escaping,
// quoted fields may span lines, CRLF or LF record terminators.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace catglm::csv {

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next record, or nullopt at end of input. Throws std::runtime_error on
    /// an unterminated quoted field.
    std::optional<std::vector<std::string>> next();

    /// 1-based physical line where the last returned record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

void write_field(std::ostream& out, const std::string& field);
void write_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace catglm::csv
