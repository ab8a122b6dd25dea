#pragma once

#include <random>

#include "plate/primal.hpp"

namespace plate {

using Rng = std::mt19937_64;

/// Random clamped scalar field: uniform interior values in [-1,1], zero
/// boundary, normalized in the quadrature norm.
ScalarField random_clamped_field(const Grid& grid, Rng& rng);

/// Random vector field over all nodes, unit quadrature norm.
VectorField2 random_vector_field(const Grid& grid, Rng& rng);

/// Random symmetric tensor field over all nodes, unit quadrature norm.
SymTensor2Field random_tensor_field(const Grid& grid, Rng& rng);

/// Random primal state (clamped fields), scaled so its packed norm is 1.
PrimalState random_state(const Grid& grid, Rng& rng);

/// Orthogonal projection (in the quadrature inner product) of a tensor field
/// onto the discretely divergence-free subspace: the weak membrane
/// equilibrium pairing <N, sym grad v> vanishes for every clamped v after
/// projection.  Used to perturb stress fields without leaving C*.
SymTensor2Field project_equilibrium(const Grid& grid,
                                    const SymTensor2Field& dn);

/// Weak equilibrium residual norm sqrt(|G^T W (N11,N12)|^2 + ...) of a
/// tensor field against zero in-plane loads; diagnostic for the projector.
double equilibrium_defect(const Grid& grid, const SymTensor2Field& n);

}  // namespace plate
