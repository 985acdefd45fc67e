#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/linalg.hpp>

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qbmor {

/// Scalar function h(s) in a frequency-affine decomposition.
class FrequencyFunction {
public:
    enum class Kind { constant, monomial, exp_decay, product };

    FrequencyFunction() = default;

    [[nodiscard]] static FrequencyFunction constant() { return {}; }

    /// s^k; k = 0 is normalized to constant.
    [[nodiscard]] static FrequencyFunction monomial(int power) {
        if (power < 0) throw Error("FrequencyFunction: negative monomial power");
        FrequencyFunction f;
        if (power == 0) return f;
        f.kind_ = Kind::monomial;
        f.power_ = power;
        return f;
    }

    /// e^{-tau s}
    [[nodiscard]] static FrequencyFunction exp_decay(double tau) {
        if (!(tau >= 0.0) || !std::isfinite(tau)) throw NegativeDelay("FrequencyFunction: delay must be >= 0");
        FrequencyFunction f;
        f.kind_ = Kind::exp_decay;
        f.tau_ = tau;
        return f;
    }

    [[nodiscard]] static FrequencyFunction product(std::vector<FrequencyFunction> factors) {
        FrequencyFunction f;
        f.kind_ = Kind::product;
        f.factors_ = std::move(factors);
        return f;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] int power() const noexcept { return power_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] const std::vector<FrequencyFunction>& factors() const noexcept { return factors_; }

    [[nodiscard]] Scalar operator()(Scalar s) const {
        switch (kind_) {
            case Kind::constant: return 1.0;
            case Kind::monomial: {
                Scalar v = 1.0;
                for (int k = 0; k < power_; ++k) v *= s;
                return v;
            }
            case Kind::exp_decay: return tau_ == 0.0 ? Scalar(1.0) : std::exp(-tau_ * s);
            case Kind::product: {
                Scalar v = 1.0;
                for (const auto& f : factors_) v *= f(s);
                return v;
            }
        }
        return 0.0;
    }

    /// Canonical text form: "1", "s^k", "exp(-tau*s)", "prod(a;b;...)".
    [[nodiscard]] std::string tag() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind_) {
            case Kind::constant: os << "1"; break;
            case Kind::monomial: os << "s^" << power_; break;
            case Kind::exp_decay: os << "exp(-" << tau_ << "*s)"; break;
            case Kind::product:
                os << "prod(";
                for (std::size_t i = 0; i < factors_.size(); ++i) os << (i ? ";" : "") << factors_[i].tag();
                os << ")";
                break;
        }
        return os.str();
    }

    /// Inverse of tag().
    [[nodiscard]] static FrequencyFunction parse(const std::string& text) {
        if (text == "1") return constant();
        if (text.rfind("s^", 0) == 0) return monomial(std::stoi(text.substr(2)));
        if (text.rfind("exp(-", 0) == 0 && text.size() > 8 && text.substr(text.size() - 3) == "*s)")
            return exp_decay(std::stod(text.substr(5, text.size() - 8)));
        if (text.rfind("prod(", 0) == 0 && text.back() == ')') {
            std::vector<FrequencyFunction> fs;
            const std::string body = text.substr(5, text.size() - 6);
            int depth = 0;
            std::size_t start = 0;
            for (std::size_t i = 0; i <= body.size(); ++i) {
                if (i == body.size() || (body[i] == ';' && depth == 0)) {
                    if (i > start) fs.push_back(parse(body.substr(start, i - start)));
                    start = i + 1;
                } else if (body[i] == '(') {
                    ++depth;
                } else if (body[i] == ')') {
                    --depth;
                }
            }
            return product(std::move(fs));
        }
        throw IOFailure("unknown frequency function tag: " + text);
    }

    friend bool operator==(const FrequencyFunction& a, const FrequencyFunction& b) { return a.tag() == b.tag(); }

private:
    Kind kind_ = Kind::constant;
    int power_ = 0;
    double tau_ = 0.0;
    std::vector<FrequencyFunction> factors_;
};

/// sum_j h_j(s) K_j
class MatrixFunction {
public:
    struct Term {
        FrequencyFunction h;
        SparseMatrix matrix;
    };

    MatrixFunction() = default;
    MatrixFunction(Index rows, Index cols) : rows_(rows), cols_(cols) {}

    MatrixFunction& add(FrequencyFunction h, SparseMatrix k) {
        if (k.rows() != rows_ || k.cols() != cols_) throw DimensionMismatch("MatrixFunction: term shape mismatch");
        k.makeCompressed();
        terms_.push_back({std::move(h), std::move(k)});
        return *this;
    }

    MatrixFunction& add(FrequencyFunction h, const Matrix& k) { return add(std::move(h), to_sparse(k)); }

    [[nodiscard]] Index rows() const noexcept { return rows_; }
    [[nodiscard]] Index cols() const noexcept { return cols_; }
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }

    [[nodiscard]] SparseMatrix eval_sparse(Scalar s) const {
        SparseMatrix out(rows_, cols_);
        for (const auto& t : terms_) {
            const Scalar c = t.h(s);
            if (c != Scalar(0)) out += c * t.matrix;
        }
        out.makeCompressed();
        return out;
    }

    [[nodiscard]] Matrix eval(Scalar s) const {
        Matrix out = Matrix::Zero(rows_, cols_);
        for (const auto& t : terms_) {
            const Scalar c = t.h(s);
            if (c != Scalar(0)) out += c * Matrix(t.matrix);
        }
        return out;
    }

    /// F(s) * X without forming F(s).
    [[nodiscard]] Matrix apply(Scalar s, const Matrix& x) const {
        if (x.rows() != cols_) throw DimensionMismatch("MatrixFunction::apply: shape mismatch");
        Matrix out = Matrix::Zero(rows_, x.cols());
        for (const auto& t : terms_) {
            const Scalar c = t.h(s);
            if (c != Scalar(0) && t.matrix.nonZeros() > 0) out.noalias() += c * (t.matrix * x);
        }
        return out;
    }

    /// F(s)^H * X
    [[nodiscard]] Matrix apply_adjoint(Scalar s, const Matrix& x) const {
        if (x.rows() != rows_) throw DimensionMismatch("MatrixFunction::apply_adjoint: shape mismatch");
        Matrix out = Matrix::Zero(cols_, x.cols());
        for (const auto& t : terms_) {
            const Scalar c = std::conj(t.h(s));
            if (c != Scalar(0) && t.matrix.nonZeros() > 0) out.noalias() += c * (t.matrix.adjoint() * x);
        }
        return out;
    }

    /// Same term list with every matrix replaced by f(matrix).
    template <class F>
    [[nodiscard]] MatrixFunction map(Index rows, Index cols, F&& f) const {
        MatrixFunction out(rows, cols);
        for (const auto& t : terms_) out.add(t.h, f(t.matrix));
        return out;
    }

    [[nodiscard]] MatrixFunction scaled(Scalar alpha) const {
        return map(rows_, cols_, [&](const SparseMatrix& k) { return SparseMatrix(alpha * k); });
    }

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Term> terms_;
};

/// sum_j g_j(s1) h_j(s2) H_j
class BivariateMatrixFunction {
public:
    struct Term {
        FrequencyFunction g;
        FrequencyFunction h;
        QuadraticOperator op;
    };

    BivariateMatrixFunction() = default;
    explicit BivariateMatrixFunction(Index n) : BivariateMatrixFunction(n, n) {}
    BivariateMatrixFunction(Index rows, Index n) : rows_(rows), n_(n) {}

    BivariateMatrixFunction& add(FrequencyFunction g, FrequencyFunction h, QuadraticOperator op) {
        if (op.n() != n_ || op.rows() != rows_) throw DimensionMismatch("BivariateMatrixFunction: operator shape mismatch");
        terms_.push_back({std::move(g), std::move(h), std::move(op)});
        return *this;
    }

    [[nodiscard]] Index rows() const noexcept { return rows_; }
    [[nodiscard]] Index n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }

    [[nodiscard]] bool is_zero() const {
        for (const auto& t : terms_)
            if (!t.op.is_zero()) return false;
        return true;
    }

    [[nodiscard]] QuadraticOperator eval(Scalar s1, Scalar s2) const {
        QuadraticOperator out = QuadraticOperator::zero(rows_, n_);
        for (const auto& t : terms_) {
            const Scalar c = t.g(s1) * t.h(s2);
            if (c != Scalar(0)) out = out.plus(t.op, c);
        }
        return out;
    }

    /// H(s1, s2) (X (x) Y)
    [[nodiscard]] Matrix apply(Scalar s1, Scalar s2, const Matrix& x, const Matrix& y) const {
        Matrix out = Matrix::Zero(rows_, x.cols() * y.cols());
        for (const auto& t : terms_) {
            if (t.op.is_zero()) continue;
            const Scalar c = t.g(s1) * t.h(s2);
            if (c != Scalar(0)) out.noalias() += c * apply_quadratic(t.op, x, y);
        }
        return out;
    }

    [[nodiscard]] BivariateMatrixFunction scaled(Scalar alpha) const {
        BivariateMatrixFunction out(rows_, n_);
        for (const auto& t : terms_) out.add(t.g, t.h, t.op.scaled(alpha));
        return out;
    }

private:
    Index rows_ = 0;
    Index n_ = 0;
    std::vector<Term> terms_;
};

}  // namespace qbmor
