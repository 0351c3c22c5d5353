#pragma once
// Sampled price path plus running local-time and occupation estimates at the
// sticky level.

#include <cstdint>
#include <ostream>
#include <vector>

#include "csv.hpp"

namespace stickybs {

enum class Scheme { time_change, stmca, gbm_exact };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::time_change: return "time_change";
        case Scheme::stmca: return "stmca";
        case Scheme::gbm_exact: return "gbm_exact";
    }
    return "?";
}

struct PathSample {
    std::vector<double> times;            // increasing, starting at 0
    std::vector<double> values;           // prices, > 0
    std::vector<double> local_time_zeta;  // running estimate of L_t^zeta(S), nondecreasing
    std::vector<double> occupation_zeta;  // running Leb{s <= t : S_s = zeta}, nondecreasing
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::gbm_exact;
};

inline void write_csv(const PathSample& p, std::ostream& os) {
    os << "t,s,local_time,occupation\n";
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        os << fmt_num(p.times[i]) << ',' << fmt_num(p.values[i]) << ','
           << fmt_num(p.local_time_zeta[i]) << ',' << fmt_num(p.occupation_zeta[i]) << '\n';
    }
}

// Long format: one file for a whole ensemble.
inline void write_ensemble_csv(const std::vector<PathSample>& paths, std::ostream& os) {
    os << "path_id,t,s,local_time,occupation\n";
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const PathSample& p = paths[k];
        for (std::size_t i = 0; i < p.times.size(); ++i) {
            os << k << ',' << fmt_num(p.times[i]) << ',' << fmt_num(p.values[i]) << ','
               << fmt_num(p.local_time_zeta[i]) << ',' << fmt_num(p.occupation_zeta[i]) << '\n';
        }
    }
}

}  // namespace stickybs
