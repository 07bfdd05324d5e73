#pragma once

namespace mwf {

// Every numerical threshold used by the library lives here.
struct Tolerances {
  // Hermitian symmetry accepted on construction before symmetrizing.
  static constexpr double construction = 1e-12;
  // Relative reconstruction error of an eigendecomposition.
  static constexpr double reconstruction = 1e-10;
  // Eigenvalues above -psd_clamp * lambda_max are treated as zero.
  static constexpr double psd_clamp = 1e-10;
  // Default relative rank cut-off for the Gram matrix eigenvalues.
  static constexpr double rank = 1e-10;
  // Group numerators below this mark a group orthogonal to the signal space.
  static constexpr double degenerate_group = 1e-12;
  // Relative slack allowed on a group power budget.
  static constexpr double feasibility = 1e-8;
};

}  // namespace mwf
