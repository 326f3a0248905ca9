#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "uqsa/simulate.hpp"

namespace uqsa {

/// Fixed float serialization: 17 significant digits, which round-trips
/// doubles exactly, and the literal sentinel `inf` for infinities so CSV
/// outputs diff byte-for-byte.
inline std::string csv_float(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void csv_row(std::ostream& os, std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

inline void csv_row(std::ostream& os, std::initializer_list<std::string> cells) {
    csv_row(os, std::span<const std::string>(cells.begin(), cells.size()));
}

/// Ensemble dump: `path_id,t,state` (a state column per dimension).
inline void write_ensemble_csv(std::ostream& os, const PathEnsemble& e) {
    std::vector<std::string> header = {"path_id", "t"};
    if (e.dim == 1) {
        header.push_back("state");
    } else {
        for (int d = 0; d < e.dim; ++d) header.push_back("state" + std::to_string(d));
    }
    csv_row(os, header);
    std::vector<std::string> row(header.size());
    for (int i = 0; i < e.n_paths(); ++i) {
        const auto& p = e.paths[static_cast<std::size_t>(i)];
        const std::size_t points = (e.kind == PathEnsemble::Kind::strided)
                                       ? p.x.size() / static_cast<std::size_t>(e.dim)
                                       : p.t.size();
        for (std::size_t k = 0; k < points; ++k) {
            row[0] = std::to_string(i);
            row[1] = csv_float(e.kind == PathEnsemble::Kind::strided
                                   ? static_cast<double>(k) * e.dt
                                   : p.t[k]);
            for (int d = 0; d < e.dim; ++d)
                row[2 + static_cast<std::size_t>(d)] =
                    csv_float(p.x[k * static_cast<std::size_t>(e.dim) + static_cast<std::size_t>(d)]);
            csv_row(os, row);
        }
    }
}

} // namespace uqsa
