#pragma once

#include "ptorus/observable.hpp"

#include <Eigen/SparseCore>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ptorus {

/// Ulam discretisation of the transfer operator on an N x N grid of cells.
/// Column j holds the cell averages of L 1_{B_j} / m(B_j); cell (i, j) has index i + N j.
class UlamMatrix {
public:
    UlamMatrix(int N, Eigen::SparseMatrix<double> P) : N_(N), P_(std::move(P)) {}

    [[nodiscard]] int N() const { return N_; }
    [[nodiscard]] int size() const { return N_ * N_; }
    [[nodiscard]] const Eigen::SparseMatrix<double>& matrix() const { return P_; }
    [[nodiscard]] int cell_of(Vec2 p) const;

    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return P_ * v; }
    [[nodiscard]] Eigen::VectorXd column_sums() const;

    /// CSV with header row,col,value.
    void write_triplets(std::ostream& os) const;

private:
    int N_;
    Eigen::SparseMatrix<double> P_;
};

/// samples_per_cell points per cell, jittered over the finest s x s grid of sub-cells (s a multiple
/// of 4, s^2 dividing samples_per_cell).
std::vector<Vec2> stratified_points(int N, int cell_i, int cell_j, int samples_per_cell, std::mt19937_64& rng);

UlamMatrix build_ulam(const MapSpec& spec, int N, int samples_per_cell = 256, std::uint64_t seed = 20240601);

/// Cell averages of h estimated with stratified samples.
Eigen::VectorXd cell_averages(const Observable& h, int N, int samples_per_cell = 64, std::uint64_t seed = 7);

/// Cell averages of L h.
Eigen::VectorXd transfer_cell_averages(const MapSpec& spec, const Observable& h, int N, int samples_per_cell = 64,
                                       std::uint64_t seed = 7);

struct Eigenpair {
    std::complex<double> value;
    double residual = 0;  ///< ||P x - value x|| / ||x||
};

/// Largest-modulus eigenvalues (count <= 20) by Arnoldi iteration, sorted by modulus.
std::vector<Eigenpair> leading_spectrum(const UlamMatrix& m, int count = 10, double tol = 1e-8);

/// CSV with header re,im,modulus,residual,disc_radius,inside_disc.
void write_spectrum_csv(std::ostream& os, const std::vector<Eigenpair>& s, double disc_radius);

} // namespace ptorus
