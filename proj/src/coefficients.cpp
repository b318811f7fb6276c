#include "invariance/coefficients.hpp"

#include <algorithm>
#include <cmath>

namespace invariance {

std::string MatrixId::name() const
{
    std::string out = "A" + std::to_string(j + 1);
    if (second_order()) {
        out += std::to_string(k + 1);
    }
    return out;
}

namespace {

CoefficientField::Entry constant_entry(Matrix value)
{
    return {[value = std::move(value)](std::span<const double>, double) { return value; }, false, false};
}

CoefficientField::Entry expression_entry(const std::vector<std::vector<std::string>>& rows, int n, int m,
                                         const std::string& what)
{
    if (static_cast<int>(rows.size()) != m) {
        throw InputError(what + ": expected " + std::to_string(m) + " rows");
    }
    std::vector<Expression> cells;
    cells.reserve(static_cast<std::size_t>(m * m));
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m) {
            throw InputError(what + ": expected " + std::to_string(m) + " columns");
        }
        for (const auto& cell : row) {
            cells.push_back(Expression::parse(cell, n));
        }
    }
    CoefficientField::Entry entry;
    for (const auto& c : cells) {
        entry.uses_x = entry.uses_x || c.uses_x();
        entry.uses_t = entry.uses_t || c.uses_t();
    }
    entry.fn = [cells = std::move(cells), m](std::span<const double> x, double t) {
        Matrix out(m, m);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                out(r, c) = cells[static_cast<std::size_t>(r * m + c)](x, t);
            }
        }
        return out;
    };
    return entry;
}

}  // namespace

CoefficientField CoefficientField::constant(int n, int m, std::vector<Matrix> second, std::vector<Matrix> first)
{
    std::vector<Entry> s;
    std::vector<Entry> f;
    for (auto& a : second) {
        s.push_back(constant_entry(std::move(a)));
    }
    if (first.empty() && n > 0 && m > 0) {
        first.assign(static_cast<std::size_t>(n), Matrix::Zero(m, m));
    }
    for (auto& a : first) {
        f.push_back(constant_entry(std::move(a)));
    }
    return from_functions(n, m, std::move(s), std::move(f));
}

CoefficientField CoefficientField::from_expressions(int n, int m,
                                                    const std::vector<std::vector<std::vector<std::string>>>& second,
                                                    const std::vector<std::vector<std::vector<std::string>>>& first)
{
    std::vector<Entry> s;
    std::vector<Entry> f;
    for (std::size_t i = 0; i < second.size(); ++i) {
        const MatrixId id{static_cast<int>(i) / std::max(n, 1), static_cast<int>(i) % std::max(n, 1)};
        s.push_back(expression_entry(second[i], n, m, id.name()));
    }
    for (std::size_t i = 0; i < first.size(); ++i) {
        f.push_back(expression_entry(first[i], n, m, MatrixId{static_cast<int>(i), -1}.name()));
    }
    if (first.empty() && n > 0 && m > 0) {
        for (int j = 0; j < n; ++j) {
            f.push_back(constant_entry(Matrix::Zero(m, m)));
        }
    }
    return from_functions(n, m, std::move(s), std::move(f));
}

CoefficientField CoefficientField::from_functions(int n, int m, std::vector<Entry> second, std::vector<Entry> first)
{
    CoefficientField out;
    out.n_ = n;
    out.m_ = m;
    out.second_ = std::move(second);
    out.first_ = std::move(first);
    for (const auto& e : out.second_) {
        out.x_dependent_ = out.x_dependent_ || e.uses_x;
        out.t_dependent_ = out.t_dependent_ || e.uses_t;
    }
    for (const auto& e : out.first_) {
        out.x_dependent_ = out.x_dependent_ || e.uses_x;
        out.t_dependent_ = out.t_dependent_ || e.uses_t;
    }
    out.validate();
    return out;
}

void CoefficientField::validate() const
{
    if (n_ < 1 || m_ < 1) {
        throw InputError("coefficient field: dimensions must be positive");
    }
    if (static_cast<int>(second_.size()) != n_ * n_) {
        throw InputError("coefficient field: expected " + std::to_string(n_ * n_) + " second-order matrices");
    }
    if (static_cast<int>(first_.size()) != n_) {
        throw InputError("coefficient field: expected " + std::to_string(n_) + " first-order matrices");
    }

    // Symmetry and shape are checked on a few fixed probe points.
    std::vector<SamplePoint> probes;
    probes.push_back({std::vector<double>(static_cast<std::size_t>(n_), 0.0), 0.0});
    if (x_dependent_ || t_dependent_) {
        std::vector<double> x(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            x[static_cast<std::size_t>(i)] = 0.37 - 0.61 * i;
        }
        probes.push_back({x, 0.73});
        probes.push_back({std::vector<double>(static_cast<std::size_t>(n_), 1.3), 0.21});
    }
    for (const auto& p : probes) {
        const CoefficientSample s = at(p);
        for (const auto& a : s.second) {
            if (a.rows() != m_ || a.cols() != m_) {
                throw InputError("coefficient field: matrix has wrong shape");
            }
            require_finite(a, "coefficient field");
        }
        for (const auto& a : s.first) {
            if (a.rows() != m_ || a.cols() != m_) {
                throw InputError("coefficient field: matrix has wrong shape");
            }
            require_finite(a, "coefficient field");
        }
        for (int j = 0; j < n_; ++j) {
            for (int k = j + 1; k < n_; ++k) {
                const Matrix& ajk = s.a(j, k, n_);
                const Matrix& akj = s.a(k, j, n_);
                if ((ajk - akj).norm() > 1e-12 * (1.0 + ajk.norm())) {
                    throw InputError("coefficient field: A" + std::to_string(j + 1) + std::to_string(k + 1) +
                                     " != A" + std::to_string(k + 1) + std::to_string(j + 1));
                }
            }
        }
    }
}

CoefficientSample CoefficientField::at(std::span<const double> x, double t) const
{
    if (static_cast<int>(x.size()) != n_) {
        throw InputError("coefficient field: sample point has wrong dimension");
    }
    CoefficientSample s;
    s.second.reserve(second_.size());
    for (const auto& e : second_) {
        s.second.push_back(e.fn(x, t));
    }
    s.first.reserve(first_.size());
    for (const auto& e : first_) {
        s.first.push_back(e.fn(x, t));
    }
    return s;
}

CoefficientField CoefficientField::scaled(double factor) const
{
    auto wrap = [factor](const Entry& e) {
        return Entry{[fn = e.fn, factor](std::span<const double> x, double t) -> Matrix { return factor * fn(x, t); },
                     e.uses_x, e.uses_t};
    };
    std::vector<Entry> s;
    std::vector<Entry> f;
    std::transform(second_.begin(), second_.end(), std::back_inserter(s), wrap);
    std::transform(first_.begin(), first_.end(), std::back_inserter(f), wrap);
    return from_functions(n_, m_, std::move(s), std::move(f));
}

std::vector<MatrixId> CoefficientField::matrix_ids() const
{
    std::vector<MatrixId> ids;
    for (int j = 0; j < n_; ++j) {
        for (int k = j; k < n_; ++k) {
            ids.push_back({j, k});
        }
    }
    for (int j = 0; j < n_; ++j) {
        ids.push_back({j, -1});
    }
    return ids;
}

const Matrix& CoefficientField::matrix(const CoefficientSample& s, const MatrixId& id) const
{
    if (id.second_order()) {
        return s.a(id.j, id.k, n_);
    }
    return s.first[static_cast<std::size_t>(id.j)];
}

std::vector<SamplePoint> sample_grid(const std::vector<std::vector<double>>& xs, const std::vector<double>& ts)
{
    std::vector<SamplePoint> out;
    for (double t : ts) {
        for (const auto& x : xs) {
            out.push_back({x, t});
        }
    }
    return out;
}

std::vector<SamplePoint> effective_samples(const CoefficientField& field, const std::vector<SamplePoint>& samples)
{
    if (samples.empty()) {
        throw InputError("empty sample grid");
    }
    for (const auto& p : samples) {
        if (static_cast<int>(p.x.size()) != field.space_dim()) {
            throw InputError("sample point has wrong dimension");
        }
        if (!(p.t >= 0.0)) {
            throw InputError("sample time must be nonnegative");
        }
    }
    if (field.is_constant()) {
        return {samples.front()};
    }

    std::vector<SamplePoint> out;
    auto push_unique = [&out](const SamplePoint& p) {
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&p](const SamplePoint& q) { return q.t == p.t && q.x == p.x; });
        if (!seen) {
            out.push_back(p);
        }
    };
    if (!field.t_dependent()) {
        for (const auto& p : samples) {
            push_unique({p.x, 0.0});
        }
        return out;
    }
    // t-dependent: every x-sample is also visited at t = 0.
    for (const auto& p : samples) {
        push_unique({p.x, 0.0});
    }
    for (const auto& p : samples) {
        push_unique(p);
    }
    return out;
}

}  // namespace invariance
