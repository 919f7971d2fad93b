#pragma once

// Minimal CSV emission with round-trip-exact doubles (17 significant
// digits), so repeated runs produce bit-identical files.

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

namespace gad {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(std::string_view line) { os_ << line << '\n'; }

    CsvWriter& field(double v) {
        if (!first_) os_ << ',';
        os_ << format_double(v);
        first_ = false;
        return *this;
    }

    CsvWriter& field(std::string_view v) {
        if (!first_) os_ << ',';
        os_ << v;
        first_ = false;
        return *this;
    }

    void end_row() {
        os_ << '\n';
        first_ = true;
    }

private:
    std::ostream& os_;
    bool first_ = true;
};

}  // namespace gad
