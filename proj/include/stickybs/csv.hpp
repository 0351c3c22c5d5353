#pragma once
// Formatting helpers shared by the CSV/JSON emitters. All numeric output goes
// through fmt_num so that repeated runs produce byte-identical files.

#include <cstdio>
#include <string>

namespace stickybs {

inline std::string fmt_num(double v, int precision = 12) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

}  // namespace stickybs
