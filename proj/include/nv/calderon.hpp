#ifndef NV_CALDERON_HPP
#define NV_CALDERON_HPP

#include <memory>

#include "nv/grid.hpp"

namespace nv {

// Free-space convolution with 1/(pi z) (or a related kernel) on a 2x zero-padded grid.
// The kernel is the disc-truncated one, cut off beyond the largest separation on the grid,
// with its closed-form Fourier transform sampled on a 4x grid; this keeps the convolution
// spectrally accurate on band-limited data.
class CauchyConvolver {
public:
    enum class Kind { cauchy, cauchy_conj, beurling };

    CauchyConvolver(const PeriodicGrid& g, Kind kind);

    const PeriodicGrid& grid() const { return grid_; }
    CMatrix apply(const CMatrix& f) const;

    // Shared instance per (grid, kind).
    static std::shared_ptr<const CauchyConvolver> get(const PeriodicGrid& g, Kind kind);

private:
    PeriodicGrid grid_;
    CMatrix kernel_hat_;  // 2n x 2n, includes the h^2 quadrature weight
};

// Throws SupportViolation when more than 1e-8 of the L1 mass lies within L/4 of the boundary.
void check_support(const Field2D& f);

Field2D cauchy_transform(const Field2D& f);
Field2D cauchy_transform_conj(const Field2D& f);
Field2D beurling_transform(const Field2D& f);
// u = S(q) = u1 + i u2 with dbar u = d q.
Field2D aux_field_u(const Field2D& q);

}  // namespace nv

#endif
