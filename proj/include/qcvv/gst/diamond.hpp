#pragma once

// Diamond distance between single-qubit channels given as Pauli transfer
// matrices. Convention: half the diamond norm of the difference, so values
// lie in [0, 1] and identical channels give 0.

#include <Eigen/Dense>

#include "qcvv/qubit_algebra.hpp"

namespace qcvv::gst {

/// Factor applied to the diamond norm of A - B.
inline constexpr double kDiamondConvention = 0.5;

using Choi = Eigen::Matrix4cd;

/// J = (1/2) sum_ij R_ij P_j^T (x) P_i (input (x) output), Tr_out J = I for TP maps.
Choi choi_from_ptm(const PTM& R);
PTM ptm_from_choi(const Choi& J);

/// Smallest Choi eigenvalue.
double min_choi_eigenvalue(const PTM& R);

struct CPTPProjection {
    PTM ptm;
    double clipped = 0.0;  // sum of clipped negative eigenvalue magnitudes
};

/// Clips negative Choi eigenvalues and restores trace preservation.
CPTPProjection project_to_cptp(const PTM& R);

struct DiamondResult {
    double value = 0.0;         // convention-scaled, from the input-state maximisation
    double cross_check = 0.0;   // from the system (x) ancilla pure-state maximisation
    bool flagged = false;       // the two differ by more than 1e-4
};

/// Throws std::invalid_argument when either map is not CPTP within 1e-8.
DiamondResult diamond_distance(const PTM& A, const PTM& B);

/// Closed form for two unitaries: sin(arc/2) of the eigenphase arc of U^dagger V
/// (1 when the arc reaches pi).
double unitary_diamond_distance(const Unitary2& U, const Unitary2& V);

}  // namespace qcvv::gst
