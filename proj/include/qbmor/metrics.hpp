#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/integration.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/system.hpp>
#include <qbmor/transfer.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace qbmor {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void same_grid(const RealMatrix& y, const RealMatrix& yr) {
    if (y.rows() != yr.rows() || y.cols() != yr.cols()) throw DimensionMismatch("trajectories differ in shape");
}

}  // namespace detail

/// ||vec(y - y_hat)||_2 / ||vec(y)||_2
[[nodiscard]] inline double relerr_L2(const RealMatrix& y, const RealMatrix& yr) {
    detail::same_grid(y, yr);
    const double den = y.norm();
    if (den == 0.0) throw ZeroReference("relerr_L2: reference output is zero");
    return (y - yr).norm() / den;
}

/// ||vec(y - y_hat)||_inf / ||vec(y)||_inf
[[nodiscard]] inline double relerr_Linf(const RealMatrix& y, const RealMatrix& yr) {
    detail::same_grid(y, yr);
    const double den = y.cwiseAbs().maxCoeff();
    if (den == 0.0) throw ZeroReference("relerr_Linf: reference output is zero");
    return (y - yr).cwiseAbs().maxCoeff() / den;
}

[[nodiscard]] inline double relerr_L2(const Trajectory& y, const Trajectory& yr) { return relerr_L2(y.outputs, yr.outputs); }
[[nodiscard]] inline double relerr_Linf(const Trajectory& y, const Trajectory& yr) {
    return relerr_Linf(y.outputs, yr.outputs);
}

struct PointwiseError {
    double t = 0.0;
    double relerr = 0.0;
    /// false when every output is below the zero guard at t
    bool included = true;
};

/// max_j |(y_j(t) - y_hat_j(t)) / y_j(t)|, skipping entries with
/// |y_j(t)| < 1e-14 max|y|.
[[nodiscard]] inline std::vector<PointwiseError> pointwise_relerr(const std::vector<double>& times, const RealMatrix& y,
                                                                  const RealMatrix& yr) {
    detail::same_grid(y, yr);
    if (static_cast<Index>(times.size()) != y.cols()) throw DimensionMismatch("pointwise_relerr: time grid mismatch");
    const double guard = 1e-14 * (y.size() ? y.cwiseAbs().maxCoeff() : 0.0);
    std::vector<PointwiseError> out(times.size());
    for (Index k = 0; k < y.cols(); ++k) {
        auto& e = out[static_cast<std::size_t>(k)];
        e.t = times[static_cast<std::size_t>(k)];
        e.included = false;
        for (Index j = 0; j < y.rows(); ++j) {
            const double ref = y(j, k);
            if (std::abs(ref) < guard || ref == 0.0) continue;
            e.included = true;
            e.relerr = std::max(e.relerr, std::abs((ref - yr(j, k)) / ref));
        }
    }
    return out;
}

[[nodiscard]] inline std::vector<PointwiseError> pointwise_relerr(const Trajectory& y, const Trajectory& yr) {
    return pointwise_relerr(y.times, y.outputs, yr.outputs);
}

/// Pointwise relative errors over a frequency grid plus the ratio-of-maxima
/// error estimate.
struct FrequencyErrors {
    std::vector<double> relerr;
    std::vector<bool> ok;
    double max_numerator = 0.0;
    double max_denominator = 0.0;

    [[nodiscard]] double hinf() const {
        if (max_denominator == 0.0) return max_numerator == 0.0 ? 0.0 : kInf;
        return max_numerator / max_denominator;
    }

    void add(std::size_t idx, double num, double den) {
        max_numerator = std::max(max_numerator, num);
        max_denominator = std::max(max_denominator, den);
        if (den > 0.0) {
            relerr[idx] = num / den;
        } else {
            relerr[idx] = num == 0.0 ? 0.0 : kInf;
            ok[idx] = num == 0.0 ? ok[idx] : false;
        }
    }
};

/// Full-model transfer function values on a grid, reused across reduced
/// models.
struct SweepValues {
    std::size_t n1 = 0;
    std::size_t n2 = 1;
    std::vector<Matrix> values;
    std::vector<bool> ok;
};

[[nodiscard]] inline SweepValues sweep_values_level1(const StructuredQBSystem& sys, const std::vector<double>& grid) {
    SweepValues sv;
    sv.n1 = grid.size();
    sv.values.resize(grid.size());
    sv.ok.assign(grid.size(), true);
    for_each_level1(
        sys, grid, [&](std::size_t i, const Matrix& g) { sv.values[i] = g; }, [&](std::size_t i) { sv.ok[i] = false; });
    return sv;
}

[[nodiscard]] inline SweepValues sweep_values_level2(const StructuredQBSystem& sys, const std::vector<double>& grid1,
                                                     const std::vector<double>& grid2) {
    SweepValues sv;
    sv.n1 = grid1.size();
    sv.n2 = grid2.size();
    sv.values.resize(sv.n1 * sv.n2);
    sv.ok.assign(sv.n1 * sv.n2, true);
    for_each_level2(
        sys, grid1, grid2, [&](std::size_t i, std::size_t j, const Matrix& g) { sv.values[i * sv.n2 + j] = g; },
        [&](std::size_t i, std::size_t j) { sv.ok[i * sv.n2 + j] = false; });
    return sv;
}

[[nodiscard]] inline FrequencyErrors relerr_sweep_1(const SweepValues& full, const StructuredQBSystem& red,
                                                    const std::vector<double>& grid) {
    FrequencyErrors fe;
    fe.relerr.assign(grid.size(), kInf);
    fe.ok = full.ok;
    std::vector<bool> seen(grid.size(), false);
    for_each_level1(
        red, grid,
        [&](std::size_t i, const Matrix& g) {
            seen[i] = true;
            if (!full.ok[i]) return;
            fe.add(i, spectral_norm(full.values[i] - g), spectral_norm(full.values[i]));
        },
        [&](std::size_t i) { fe.ok[i] = false; });
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!seen[i]) fe.ok[i] = false;
    return fe;
}

[[nodiscard]] inline FrequencyErrors relerr_sweep_1(const StructuredQBSystem& sys, const StructuredQBSystem& red,
                                                    const std::vector<double>& grid) {
    return relerr_sweep_1(sweep_values_level1(sys, grid), red, grid);
}

[[nodiscard]] inline double relerr_Hinf_1(const StructuredQBSystem& sys, const StructuredQBSystem& red,
                                          const std::vector<double>& grid) {
    return relerr_sweep_1(sys, red, grid).hinf();
}

[[nodiscard]] inline FrequencyErrors relerr_sweep_2(const SweepValues& full, const StructuredQBSystem& red,
                                                    const std::vector<double>& grid1, const std::vector<double>& grid2) {
    FrequencyErrors fe;
    const std::size_t n2 = grid2.size();
    fe.relerr.assign(grid1.size() * n2, kInf);
    fe.ok = full.ok;
    std::vector<bool> seen(fe.relerr.size(), false);
    for_each_level2(
        red, grid1, grid2,
        [&](std::size_t i, std::size_t j, const Matrix& g) {
            const std::size_t idx = i * n2 + j;
            seen[idx] = true;
            if (!full.ok[idx]) return;
            fe.add(idx, spectral_norm(full.values[idx] - g), spectral_norm(full.values[idx]));
        },
        [&](std::size_t i, std::size_t j) { fe.ok[i * n2 + j] = false; });
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) fe.ok[i] = false;
    return fe;
}

[[nodiscard]] inline FrequencyErrors relerr_sweep_2(const StructuredQBSystem& sys, const StructuredQBSystem& red,
                                                    const std::vector<double>& grid1, const std::vector<double>& grid2) {
    return relerr_sweep_2(sweep_values_level2(sys, grid1, grid2), red, grid1, grid2);
}

[[nodiscard]] inline double relerr_Hinf_2(const StructuredQBSystem& sys, const StructuredQBSystem& red,
                                          const std::vector<double>& grid1, const std::vector<double>& grid2) {
    return relerr_sweep_2(sys, red, grid1, grid2).hinf();
}

struct ErrorReport {
    std::string method_tag;
    double relerr_L2 = kInf;
    double relerr_Linf = kInf;
    double relerr_Hinf_1 = kInf;
    double relerr_Hinf_2 = kInf;
    bool stable = true;
    std::string note;
};

/// Shortest text that reads back to the same double; `inf` for infinities.
[[nodiscard]] inline std::string format_full(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// 5 significant digits in exponent form, e.g. 8.1604e-07.
[[nodiscard]] inline std::string format_short(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

inline constexpr const char* kTableHeader = "method,relerr_L2,relerr_Linf,relerr_Hinf1,relerr_Hinf2";

/// RFC 4180 quoting for fields holding commas, quotes or newlines.
[[nodiscard]] inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    return out + "\"";
}

inline void write_table(std::ostream& os, const std::vector<ErrorReport>& reports) {
    os << kTableHeader << '\n';
    for (const auto& r : reports)
        os << csv_field(r.method_tag) << ',' << format_full(r.relerr_L2) << ',' << format_full(r.relerr_Linf) << ','
           << format_full(r.relerr_Hinf_1) << ',' << format_full(r.relerr_Hinf_2) << '\n';
}

inline void emit_table(const std::vector<ErrorReport>& reports, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IOFailure("cannot open " + path + " for writing");
    write_table(os, reports);
    if (!os) throw IOFailure("failed writing " + path);
}

/// Aligned human-readable rendering of the error table.
inline void print_table(std::ostream& os, const std::vector<ErrorReport>& reports) {
    std::size_t w = 6;
    for (const auto& r : reports) w = std::max(w, r.method_tag.size());
    char line[256];
    std::snprintf(line, sizeof line, "%-*s  %12s  %12s  %12s  %12s\n", static_cast<int>(w), "method", "relerr_L2",
                  "relerr_Linf", "relerr_Hinf1", "relerr_Hinf2");
    os << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-*s  %12s  %12s  %12s  %12s\n", static_cast<int>(w), r.method_tag.c_str(),
                      format_short(r.relerr_L2).c_str(), format_short(r.relerr_Linf).c_str(),
                      format_short(r.relerr_Hinf_1).c_str(), format_short(r.relerr_Hinf_2).c_str());
        os << line;
    }
}

}  // namespace qbmor
