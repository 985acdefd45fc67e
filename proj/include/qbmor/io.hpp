#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/frequency.hpp>
#include <qbmor/integration.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/pod.hpp>
#include <qbmor/projection.hpp>
#include <qbmor/system.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qbmor {

namespace fs = std::filesystem;

/// Writes a sparse matrix in MatrixMarket coordinate format (real when all
/// imaginary parts vanish).
inline void write_mtx(const fs::path& path, const SparseMatrix& a) {
    std::ofstream os(path);
    if (!os) throw IOFailure("cannot open " + path.string());
    bool is_real = true;
    for (Index k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            if (it.value().imag() != 0.0) is_real = false;
    os << "%%MatrixMarket matrix coordinate " << (is_real ? "real" : "complex") << " general\n";
    os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    char buf[96];
    for (Index k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            if (is_real)
                std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(it.row() + 1),
                              static_cast<long long>(it.col() + 1), it.value().real());
            else
                std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n", static_cast<long long>(it.row() + 1),
                              static_cast<long long>(it.col() + 1), it.value().real(), it.value().imag());
            os << buf;
        }
    }
    if (!os) throw IOFailure("failed writing " + path.string());
}

inline void write_mtx(const fs::path& path, const Matrix& a) { write_mtx(path, SparseMatrix(a.sparseView(1.0, 0.0))); }

/// Reads MatrixMarket coordinate or array files (real/complex/integer,
/// general/symmetric).
[[nodiscard]] inline SparseMatrix read_mtx(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw IOFailure("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw IOFailure(path.string() + ": missing MatrixMarket banner");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    const bool complex_field = field == "complex";
    const bool symmetric = symmetry == "symmetric";
    const bool hermitian = symmetry == "hermitian";
    if (field == "pattern") throw IOFailure(path.string() + ": pattern matrices are not supported");
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '%') break;
    std::istringstream dims(line);
    long long rows = 0, cols = 0, nnz = 0;
    dims >> rows >> cols;
    std::vector<Eigen::Triplet<Scalar>> trips;
    auto read_value = [&](std::istream& in) {
        double re = 0.0, im = 0.0;
        in >> re;
        if (complex_field) in >> im;
        if (!in) throw IOFailure(path.string() + ": malformed entry");
        return Scalar(re, im);
    };
    if (format == "coordinate") {
        dims >> nnz;
        for (long long k = 0; k < nnz; ++k) {
            long long i = 0, j = 0;
            is >> i >> j;
            const Scalar v = read_value(is);
            if (i < 1 || j < 1 || i > rows || j > cols) throw IOFailure(path.string() + ": index out of range");
            trips.emplace_back(i - 1, j - 1, v);
            if ((symmetric || hermitian) && i != j) trips.emplace_back(j - 1, i - 1, hermitian ? std::conj(v) : v);
        }
    } else if (format == "array") {
        for (long long j = 0; j < cols; ++j)
            for (long long i = 0; i < rows; ++i) {
                const Scalar v = read_value(is);
                if (v != Scalar(0)) trips.emplace_back(i, j, v);
            }
    } else {
        throw IOFailure(path.string() + ": unknown MatrixMarket format " + format);
    }
    SparseMatrix a(rows, cols);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

namespace detail {

inline nlohmann::json write_function(const fs::path& dir, const std::string& stem, const MatrixFunction& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (std::size_t k = 0; k < f.terms().size(); ++k) {
        const std::string file = stem + "_" + std::to_string(k) + ".mtx";
        write_mtx(dir / file, f.terms()[k].matrix);
        terms.push_back({{"h", f.terms()[k].h.tag()}, {"file", file}});
    }
    return {{"rows", f.rows()}, {"cols", f.cols()}, {"terms", terms}};
}

inline MatrixFunction read_function(const fs::path& dir, const nlohmann::json& j) {
    MatrixFunction f(j.at("rows").get<Index>(), j.at("cols").get<Index>());
    for (const auto& t : j.at("terms"))
        f.add(FrequencyFunction::parse(t.at("h").get<std::string>()), read_mtx(dir / t.at("file").get<std::string>()));
    return f;
}

}  // namespace detail

/// Directory layout: system.json manifest plus one .mtx file per term
/// matrix; quadratic operators are stored as n x n^2 matrices.
inline void save_system(const fs::path& dir, const StructuredQBSystem& sys, const nlohmann::json& metadata = {}) {
    fs::create_directories(dir);
    nlohmann::json j;
    j["structure"] = to_string(sys.structure);
    j["n"] = sys.n;
    j["m"] = sys.m;
    j["p"] = sys.p;
    j["C"] = detail::write_function(dir, "C", sys.C);
    j["K"] = detail::write_function(dir, "K", sys.K);
    j["B"] = detail::write_function(dir, "B", sys.B);
    j["N"] = nlohmann::json::array();
    for (std::size_t k = 0; k < sys.N.size(); ++k)
        j["N"].push_back(detail::write_function(dir, "N" + std::to_string(k + 1), sys.N[k]));
    nlohmann::json h = nlohmann::json::array();
    for (std::size_t k = 0; k < sys.H.terms().size(); ++k) {
        const auto& t = sys.H.terms()[k];
        const std::string file = "H_" + std::to_string(k) + ".mtx";
        const Index n = t.op.n();
        SparseMatrix flat(t.op.rows(), n * n);
        std::vector<Eigen::Triplet<Scalar>> trips;
        for (Index s = 0; s < n; ++s)
            for (Index c = 0; c < t.op.slice(s).outerSize(); ++c)
                for (SparseMatrix::InnerIterator it(t.op.slice(s), c); it; ++it)
                    trips.emplace_back(it.row(), s * n + it.col(), it.value());
        flat.setFromTriplets(trips.begin(), trips.end());
        write_mtx(dir / file, flat);
        h.push_back({{"g", t.g.tag()}, {"h", t.h.tag()}, {"file", file}});
    }
    j["H"] = h;
    if (!metadata.is_null()) j["metadata"] = metadata;
    std::ofstream os(dir / "system.json");
    if (!os) throw IOFailure("cannot write manifest in " + dir.string());
    os << j.dump(2) << '\n';
}

[[nodiscard]] inline StructuredQBSystem load_system(const fs::path& dir) {
    std::ifstream is(dir / "system.json");
    if (!is) throw IOFailure("missing system.json in " + dir.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IOFailure(std::string("malformed system.json: ") + e.what());
    }
    try {
        StructuredQBSystem sys;
        sys.structure = structure_from_string(j.value("structure", "general"));
        sys.n = j.at("n").get<Index>();
        sys.m = j.at("m").get<Index>();
        sys.p = j.at("p").get<Index>();
        sys.C = detail::read_function(dir, j.at("C"));
        sys.K = detail::read_function(dir, j.at("K"));
        sys.B = detail::read_function(dir, j.at("B"));
        for (const auto& nj : j.at("N")) sys.N.push_back(detail::read_function(dir, nj));
        sys.H = BivariateMatrixFunction(sys.n);
        for (const auto& t : j.at("H")) {
            const SparseMatrix flat = read_mtx(dir / t.at("file").get<std::string>());
            if (flat.rows() != sys.n || flat.cols() != sys.n * sys.n) throw DimensionMismatch("H file must be n x n^2");
            std::vector<std::vector<Eigen::Triplet<Scalar>>> per(static_cast<std::size_t>(sys.n));
            for (Index c = 0; c < flat.outerSize(); ++c)
                for (SparseMatrix::InnerIterator it(flat, c); it; ++it)
                    per[static_cast<std::size_t>(it.col() / sys.n)].emplace_back(it.row(), it.col() % sys.n, it.value());
            std::vector<SparseMatrix> slices;
            for (const auto& tr : per) {
                SparseMatrix s(sys.n, sys.n);
                s.setFromTriplets(tr.begin(), tr.end());
                slices.push_back(std::move(s));
            }
            sys.H.add(FrequencyFunction::parse(t.at("g").get<std::string>()),
                      FrequencyFunction::parse(t.at("h").get<std::string>()), QuadraticOperator(std::move(slices)));
        }
        sys.validate();
        return sys;
    } catch (const nlohmann::json::exception& e) {
        throw IOFailure(std::string("malformed system.json: ") + e.what());
    }
}

[[nodiscard]] inline nlohmann::json ledger_json(const ReducedModel& red) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : red.ledger)
        j.push_back({{"condition", c.condition.describe()},
                     {"relative_error", std::isfinite(c.relative_error) ? nlohmann::json(c.relative_error)
                                                                       : nlohmann::json("inf")},
                     {"pass", c.pass},
                     {"note", c.note}});
    return j;
}

/// Reduced model directory: the reduced system, the bases and the ledger.
inline void save_reduced(const fs::path& dir, const ReducedModel& red) {
    nlohmann::json meta;
    meta["method"] = red.basis.method_tag;
    meta["parent"] = red.parent_id;
    meta["order"] = red.system.n;
    meta["work"] = {{"factorizations", red.basis.work.factorizations}, {"solves", red.basis.work.solves}};
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& s : red.basis.points_used.points) pts.push_back({s.real(), s.imag()});
    meta["points"] = pts;
    meta["ledger"] = ledger_json(red);
    save_system(dir, red.system, meta);
    write_mtx(dir / "V.mtx", red.basis.V);
    write_mtx(dir / "W.mtx", red.basis.W);
}

/// time column followed by one column per output
inline void write_trajectory_csv(const fs::path& path, const Trajectory& tr) {
    std::ofstream os(path);
    if (!os) throw IOFailure("cannot open " + path.string());
    os << "t";
    for (Index j = 0; j < tr.outputs.rows(); ++j) os << ",y" << (j + 1);
    os << '\n';
    char buf[40];
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", tr.times[k]);
        os << buf;
        for (Index j = 0; j < tr.outputs.rows(); ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", tr.outputs(j, static_cast<Index>(k)));
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace qbmor
