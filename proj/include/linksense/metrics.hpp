#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "linksense/adjacency.hpp"

namespace linksense {

/// Counters of one completed run. Control transmissions count every
/// emitted Hello and TC frame, including flood relays; packets still in
/// flight at the end of the run count as sent but not received.
struct RunResult {
    std::uint64_t data_sent = 0;
    std::uint64_t data_received = 0;
    std::uint64_t control_transmissions = 0;
    std::uint64_t control_bytes = 0;
    std::uint64_t run_seed = 0;
    double speed_kmh = 0.0;
    Algorithm algorithm = Algorithm::Loss;
    std::uint64_t trace_hash = 0;
};

/// Packet delivery ratio: received / sent.
inline double pdr(const RunResult& r) {
    if (r.data_sent == 0) throw std::domain_error("pdr: no data packets were sent");
    return static_cast<double>(r.data_received) / static_cast<double>(r.data_sent);
}

inline std::uint64_t overhead(const RunResult& r) { return r.control_transmissions; }

/// Student-t 0.975 quantiles for df = 1..64; beyond that the normal
/// approximation (1.96) is close enough for this experiment's scale.
inline constexpr std::array<double, 64> kStudentT975{
    12.7062047364, 4.3026527297, 3.1824463053, 2.7764451052,
    2.5705818356,  2.4469118511, 2.3646242516, 2.3060041352,
    2.2621571629,  2.2281388520, 2.2009851601, 2.1788128297,
    2.1603686565,  2.1447866879, 2.1314495456, 2.1199052992,
    2.1098155778,  2.1009220402, 2.0930240544, 2.0859634473,
    2.0796138447,  2.0738730679, 2.0686576104, 2.0638985616,
    2.0595385528,  2.0555294386, 2.0518305165, 2.0484071418,
    2.0452296421,  2.0422724563, 2.0395134464, 2.0369333435,
    2.0345152974,  2.0322445093, 2.0301079283, 2.0280940010,
    2.0261924630,  2.0243941639, 2.0226909200, 2.0210753903,
    2.0195409704,  2.0180817028, 2.0166921992, 2.0153675744,
    2.0141033889,  2.0128955989, 2.0117405137, 2.0106347576,
    2.0095752371,  2.0085591121, 2.0075837703, 2.0066468051,
    2.0057459953,  2.0048792882, 2.0040447833, 2.0032407188,
    2.0024654593,  2.0017174841, 2.0009953781, 2.0002978220,
    1.9996235850,  1.9989715170, 1.9983405425, 1.9977296543,
};

inline double student_t_975(std::size_t degrees_of_freedom) {
    if (degrees_of_freedom == 0) throw std::domain_error("student_t_975: df must be >= 1");
    if (degrees_of_freedom <= kStudentT975.size()) return kStudentT975[degrees_of_freedom - 1];
    return 1.96;
}

struct AggregateStat {
    double mean = 0.0;
    double ci95_halfwidth = 0.0;
    std::size_t n = 0;
};

/// Sample mean and 95% confidence halfwidth t_{0.975,n-1} * s / sqrt(n),
/// with s the (n-1)-denominator sample standard deviation.
inline AggregateStat mean_ci95(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("mean_ci95: need at least 2 samples");
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double stddev = std::sqrt(ss / (n - 1));
    const double halfwidth = student_t_975(n - 1) * stddev / std::sqrt(static_cast<double>(n));
    return {mean, halfwidth, n};
}

}  // namespace linksense
