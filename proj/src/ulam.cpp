#include "ptorus/ulam.hpp"

#include "ptorus/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace ptorus {

int UlamMatrix::cell_of(Vec2 p) const {
    const Vec2 q = wrap(p).vec();
    const int i = std::min(N_ - 1, static_cast<int>(q.x * N_));
    const int j = std::min(N_ - 1, static_cast<int>(q.y * N_));
    return i + N_ * j;
}

Eigen::VectorXd UlamMatrix::column_sums() const {
    return Eigen::RowVectorXd::Ones(P_.rows()) * P_;
}

void UlamMatrix::write_triplets(std::ostream& os) const {
    const auto old = os.precision(17);
    os << "row,col,value\n";
    for (int c = 0; c < P_.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(P_, c); it; ++it)
            os << it.row() << ',' << it.col() << ',' << it.value() << '\n';
    os.precision(old);
}

std::vector<Vec2> stratified_points(int N, int cell_i, int cell_j, int samples_per_cell, std::mt19937_64& rng) {
    if (samples_per_cell < 16 || samples_per_cell % 16 != 0)
        throw InvalidArgument("stratified_points: samples_per_cell must be a positive multiple of 16");
    int side = 4;
    while (samples_per_cell % ((side + 4) * (side + 4)) == 0) side += 4;
    const int per = samples_per_cell / (side * side);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1.0 / N, s = h / side;
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(samples_per_cell));
    for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b)
            for (int k = 0; k < per; ++k) {
                const double x = cell_i * h + (a + u(rng)) * s;
                const double y = cell_j * h + (b + u(rng)) * s;
                out.push_back({std::min(x, std::nextafter(1.0, 0.0)), std::min(y, std::nextafter(1.0, 0.0))});
            }
    return out;
}

UlamMatrix build_ulam(const MapSpec& spec, int N, int samples_per_cell, std::uint64_t seed) {
    if (N < 1 || N > 1024) throw InvalidArgument("build_ulam: N in [1, 1024] required");
    const Map& m = *spec.map;
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * N * 8);
    UlamMatrix shape(N, {});
    const double inv = 1.0 / samples_per_cell;
    std::vector<std::pair<int, double>> col_entries;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const int col = i + N * j;
            col_entries.clear();
            for (const Vec2& x : stratified_points(N, i, j, samples_per_cell, rng)) {
                const int cell = m.cell_of(x);
                const Mat2 d = m.jacobian_raw(x, cell);
                const double w = spec.weight(x, d) * std::abs(d.det());
                col_entries.emplace_back(shape.cell_of(m.eval_raw(x, cell)), w * inv);
            }
            std::sort(col_entries.begin(), col_entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t a = 0; a < col_entries.size();) {
                double v = 0;
                std::size_t b = a;
                for (; b < col_entries.size() && col_entries[b].first == col_entries[a].first; ++b) v += col_entries[b].second;
                trip.emplace_back(col_entries[a].first, col, v);
                a = b;
            }
        }
    Eigen::SparseMatrix<double> P(N * N, N * N);
    P.setFromTriplets(trip.begin(), trip.end());
    P.makeCompressed();
    return {N, std::move(P)};
}

Eigen::VectorXd cell_averages(const Observable& h, int N, int samples_per_cell, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::VectorXd v(N * N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            double s = 0;
            for (const Vec2& x : stratified_points(N, i, j, samples_per_cell, rng)) s += h.value(x);
            v[i + N * j] = s / samples_per_cell;
        }
    return v;
}

Eigen::VectorXd transfer_cell_averages(const MapSpec& spec, const Observable& h, int N, int samples_per_cell,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::VectorXd v(N * N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            double s = 0;
            for (const Vec2& y : stratified_points(N, i, j, samples_per_cell, rng))
                s += transfer_apply(spec, h, TorusPoint(y));
            v[i + N * j] = s / samples_per_cell;
        }
    return v;
}

std::vector<Eigenpair> leading_spectrum(const UlamMatrix& um, int count, double tol) {
    if (count < 1 || count > 20) throw InvalidArgument("leading_spectrum: count in [1, 20] required");
    const auto& P = um.matrix();
    const Eigen::Index n = P.rows();
    if (n == 0) throw InvalidArgument("leading_spectrum: empty matrix");
    const int want = static_cast<int>(std::min<Eigen::Index>(count, n));

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    Eigen::VectorXd v0(n);
    for (Eigen::Index i = 0; i < n; ++i) v0[i] = u(rng);

    int m = static_cast<int>(std::min<Eigen::Index>(n, std::max(3 * count + 30, 80)));
    std::vector<Eigenpair> best;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Eigen::MatrixXd V(n, m + 1);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        V.col(0) = v0.normalized();
        int used = m;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = P * V.col(j);
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
                w -= V.leftCols(j + 1) * h;
                H.col(j).head(j + 1) += h;
            }
            H(j + 1, j) = w.norm();
            if (H(j + 1, j) < 1e-13) {
                used = j + 1;
                break;
            }
            V.col(j + 1) = w / H(j + 1, j);
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(used, used));
        const Eigen::VectorXcd theta = es.eigenvalues();
        const Eigen::MatrixXcd Y = es.eigenvectors();
        std::vector<int> order(static_cast<std::size_t>(used));
        for (int i = 0; i < used; ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });

        best.clear();
        const Eigen::MatrixXcd Vc = V.leftCols(used).cast<std::complex<double>>();
        Eigen::VectorXd restart = Eigen::VectorXd::Zero(n);
        double worst = 0;
        for (int r = 0; r < std::min(want, used); ++r) {
            const int i = order[static_cast<std::size_t>(r)];
            const Eigen::VectorXcd x = Vc * Y.col(i);
            const Eigen::VectorXcd px = P.cast<std::complex<double>>() * x;
            const double res = (px - theta[i] * x).norm() / x.norm();
            best.push_back({theta[i], res});
            worst = std::max(worst, res);
            restart += x.real() / x.norm();
        }
        if (worst <= tol || m >= std::min<Eigen::Index>(n, 640)) break;
        if (restart.norm() > 0) v0 = restart;
        m = static_cast<int>(std::min<Eigen::Index>(n, 2 * m));
    }
    return best;
}

void write_spectrum_csv(std::ostream& os, const std::vector<Eigenpair>& s, double disc_radius) {
    const auto old = os.precision(17);
    os << "re,im,modulus,residual,disc_radius,inside_disc\n";
    for (const auto& e : s)
        os << e.value.real() << ',' << e.value.imag() << ',' << std::abs(e.value) << ',' << e.residual << ','
           << disc_radius << ',' << (std::abs(e.value) <= disc_radius ? 1 : 0) << '\n';
    os.precision(old);
}

} // namespace ptorus
