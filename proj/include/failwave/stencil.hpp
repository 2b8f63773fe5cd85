#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace failwave {

/// How a line of cell values is continued past one of its ends.
enum class AxisBcKind {
    Periodic,   // wraps to the opposite end
    Odd,        // ghost = 2*value - mirror (Dirichlet value on the face)
    Even,       // ghost = mirror (zero normal gradient)
    Prescribed  // boundary face flux supplied externally; no ghosts
};

/// Face-gradient operator along one axis of a cell-centered line, together
/// with face quadrature weights. The matching divergence is the negative
/// weighted transpose, so div and grad form a summation-by-parts pair and
/// sum_f w_f F_f (G u)_f h == -sum_i (div F)_i u_i h + boundary terms.
///
/// Face k sits at x0 + k*h, k = 0..n. Periodic lines keep faces 0..n-1 with
/// face 0 joining cells n-1 and 0. Faces on a Prescribed end are omitted.
class AxisOperator {
public:
    struct Term {
        int cell;
        double coef;
    };

    struct Face {
        int position = 0;             // k
        std::array<Term, 8> terms{};  // merged cell coefficients
        int count = 0;
        double left_coef = 0.0;       // multiplies the left Dirichlet value
        double right_coef = 0.0;      // multiplies the right Dirichlet value
        double weight = 1.0;
    };

    AxisOperator() = default;

    /// `order` is 2 (compact two-point gradient) or 4 (four-point staggered
    /// gradient, falling back to two points where ghosts are unavailable).
    AxisOperator(int n, double h, AxisBcKind left, AxisBcKind right, int order = 2)
        : n_(n), h_(h), left_(left), right_(right), order_(order) {
        const bool periodic = left == AxisBcKind::Periodic;
        const int last = periodic ? n - 1 : n;
        for (int k = 0; k <= last; ++k) {
            const bool boundary_left = !periodic && k == 0;
            const bool boundary_right = !periodic && k == n;
            if ((boundary_left && left == AxisBcKind::Prescribed) || (boundary_right && right == AxisBcKind::Prescribed))
                continue;
            Face f;
            f.position = k;
            f.weight = (boundary_left || boundary_right) ? 0.5 : 1.0;
            bool built = false;
            if (order == 4) {
                const int cells[4] = {k - 2, k - 1, k, k + 1};
                const double coefs[4] = {1.0 / 24.0, -27.0 / 24.0, 27.0 / 24.0, -1.0 / 24.0};
                built = build(f, cells, coefs, 4);
            }
            if (!built) {
                const int cells[2] = {k - 1, k};
                const double coefs[2] = {-1.0, 1.0};
                built = build(f, cells, coefs, 2);
            }
            if (built) faces_.push_back(f);
        }
    }

    int cells() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    int order() const noexcept { return order_; }
    AxisBcKind left() const noexcept { return left_; }
    AxisBcKind right() const noexcept { return right_; }
    const std::vector<Face>& faces() const noexcept { return faces_; }

    /// Gradient at face f of the line u[offset + i*stride].
    double gradient(const Face& f, const double* u, std::size_t stride, double left_value, double right_value) const {
        double g = f.left_coef * left_value + f.right_coef * right_value;
        for (int t = 0; t < f.count; ++t) g += f.terms[t].coef * u[f.terms[t].cell * stride];
        return g;
    }

    /// Adds -sum_f w_f flux_f dG_f/du_i, i.e. the divergence of a face flux,
    /// into div[i*stride]. `flux` is indexed like faces().
    void accumulate_divergence(const std::vector<double>& flux, double* div, std::size_t stride) const {
        for (std::size_t q = 0; q < faces_.size(); ++q) {
            const Face& f = faces_[q];
            const double wf = f.weight * flux[q];
            for (int t = 0; t < f.count; ++t) div[f.terms[t].cell * stride] -= wf * f.terms[t].coef;
        }
    }

private:
    bool build(Face& f, const int* cells, const double* coefs, int m) {
        Face trial = f;
        trial.count = 0;
        trial.left_coef = trial.right_coef = 0.0;
        for (int s = 0; s < m; ++s) {
            int c = cells[s];
            double a = coefs[s] / h_;
            if (c < 0) {
                switch (left_) {
                case AxisBcKind::Periodic: c += n_; break;
                case AxisBcKind::Odd: trial.left_coef += 2.0 * a; c = -1 - c; a = -a; break;
                case AxisBcKind::Even: c = -1 - c; break;
                case AxisBcKind::Prescribed: return false;
                }
            } else if (c >= n_) {
                switch (right_) {
                case AxisBcKind::Periodic: c -= n_; break;
                case AxisBcKind::Odd: trial.right_coef += 2.0 * a; c = 2 * n_ - 1 - c; a = -a; break;
                case AxisBcKind::Even: c = 2 * n_ - 1 - c; break;
                case AxisBcKind::Prescribed: return false;
                }
            }
            if (c < 0 || c >= n_) return false;
            add(trial, c, a);
        }
        f = trial;
        return true;
    }

    static void add(Face& f, int cell, double coef) {
        for (int t = 0; t < f.count; ++t) {
            if (f.terms[t].cell == cell) {
                f.terms[t].coef += coef;
                return;
            }
        }
        f.terms[f.count++] = {cell, coef};
    }

    int n_ = 0;
    double h_ = 1.0;
    AxisBcKind left_ = AxisBcKind::Even;
    AxisBcKind right_ = AxisBcKind::Even;
    int order_ = 2;
    std::vector<Face> faces_;
};

} // namespace failwave
