#pragma once

#include <vector>

#include "qslab/field.hpp"
#include "qslab/mesh.hpp"

namespace qslab {

/// Face-constant scalar data (PL gradients make brackets face-wise).
struct FaceField {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int f) const { return values[f]; }
};

/// Discrete Poisson bracket: per face ((grad F x grad G) . n) * euclid_total,
/// so that dF ^ dG = {F,G} w for the unit-total-area form w.
FaceField bracket(const TriMesh& mesh, const ScalarField& f, const ScalarField& g);

/// Uniform norm, max over faces of |value|.
double sup_norm(const FaceField& b);

/// Integral norm, sum of |value| * face_area.
double l1_norm(const TriMesh& mesh, const FaceField& b);

}  // namespace qslab
