#pragma once

#include "invariance/expression.hpp"
#include "invariance/linalg.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace invariance {

/// A point (x, t) of the space-time layer.
struct SamplePoint {
    std::vector<double> x;
    double t = 0.0;
};

/// The coefficient matrices evaluated at one point.
struct CoefficientSample {
    std::vector<Matrix> second;  // row-major n x n, second[j*n + k] = A_jk
    std::vector<Matrix> first;   // A_j, j = 0..n-1

    const Matrix& a(int j, int k, int n) const { return second[static_cast<std::size_t>(j * n + k)]; }
};

/// Identifies one coefficient matrix: A_jk (second order) or A_j (first order), 0-based.
struct MatrixId {
    int j = 0;
    int k = -1;  // -1 for first-order matrices

    bool second_order() const { return k >= 0; }
    std::string name() const;  // "A11", "A12", "A1" (1-based, as printed)
    friend bool operator==(const MatrixId&, const MatrixId&) = default;
};

/// The coefficients A_jk(x,t) = A_kj(x,t) and A_j(x,t) of
///   u_t = sum_jk A_jk u_{x_j x_k} + sum_j A_j u_{x_j}.
///
/// Entries are arithmetic expressions, so constant, x-dependent and t-dependent
/// systems share one representation. Callers may also supply arbitrary matrix
/// functions directly.
class CoefficientField {
  public:
    using MatrixFunction = std::function<Matrix(std::span<const double> x, double t)>;

    struct Entry {
        MatrixFunction fn;
        bool uses_x = false;
        bool uses_t = false;
    };

    /// Constant coefficients. `second` is row-major n x n; `first` has n entries
    /// (an empty `first` means no drift).
    static CoefficientField constant(int n, int m, std::vector<Matrix> second, std::vector<Matrix> first = {});

    /// Entry-wise expressions. Layout as in constant().
    static CoefficientField from_expressions(int n, int m, const std::vector<std::vector<std::vector<std::string>>>& second,
                                             const std::vector<std::vector<std::vector<std::string>>>& first);

    /// Generic matrix functions with declared dependencies.
    static CoefficientField from_functions(int n, int m, std::vector<Entry> second, std::vector<Entry> first);

    int space_dim() const { return n_; }
    int components() const { return m_; }
    bool x_dependent() const { return x_dependent_; }
    bool t_dependent() const { return t_dependent_; }
    bool is_constant() const { return !x_dependent_ && !t_dependent_; }

    CoefficientSample at(std::span<const double> x, double t) const;
    CoefficientSample at(const SamplePoint& p) const { return at(p.x, p.t); }

    /// Same system with every matrix multiplied by `factor`.
    CoefficientField scaled(double factor) const;

    /// All distinct matrix ids: A_jk with j <= k, then A_j.
    std::vector<MatrixId> matrix_ids() const;
    const Matrix& matrix(const CoefficientSample& s, const MatrixId& id) const;

  private:
    void validate() const;

    int n_ = 0;
    int m_ = 0;
    std::vector<Entry> second_;
    std::vector<Entry> first_;
    bool x_dependent_ = false;
    bool t_dependent_ = false;
};

/// Tensor-product sample grid: every x in `xs` combined with every t in `ts`.
std::vector<SamplePoint> sample_grid(const std::vector<std::vector<double>>& xs, const std::vector<double>& ts);

/// The grid a check actually needs: one point for constant fields, the x-samples
/// at t = 0 for t-independent fields, the full grid otherwise.
std::vector<SamplePoint> effective_samples(const CoefficientField& field, const std::vector<SamplePoint>& samples);

}  // namespace invariance
