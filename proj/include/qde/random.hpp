// Seeded generators for states, unitaries and partitions.

#pragma once

#include <cstdint>
#include <random>

#include "qde/linalg.hpp"

namespace qde {

using Rng = std::mt19937_64;

// Seed for the k-th independent stream derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Entries with independent standard normal real and imaginary parts.
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng);

// Entries uniform in [-1, 1] (real and imaginary), symmetrized.
HermitianMatrix random_hermitian(std::size_t dim, Rng& rng);

// G G^† / tr with G a dim x rank Ginibre matrix.
HermitianMatrix random_density(std::size_t dim, Rng& rng, std::size_t rank = 0);

// Haar-distributed unitary via QR with phase correction.
ComplexMatrix haar_unitary(std::size_t dim, Rng& rng);

ComplexVector random_unit_vector(std::size_t dim, Rng& rng);

}  // namespace qde
