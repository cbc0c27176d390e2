#include "fowt/tower_model.hpp"

namespace fowt::tower {

namespace {

const std::vector<double> kReferenceD{
    10.000, 10.000, 10.000, 9.912, 9.799, 9.683, 9.565, 9.444,
    9.320, 9.194, 9.064, 8.931, 8.794, 8.654, 8.510, 8.361,
    8.207, 8.049, 7.885, 7.715, 7.538, 7.353, 7.161, 6.954,
    6.747, 6.494, 6.171, 6.000, 6.000, 6.000, 6.000,
};
const std::vector<double> kReferenceH{
    3.1885, 5.0410, 5.0420, 5.0410, 4.0400, 5.0410, 5.0420, 5.0410,
    5.0410, 5.0420, 5.0410, 5.0410, 5.0420, 5.0410, 5.0410, 5.0420,
    5.0410, 5.0410, 5.0420, 5.0410, 5.0410, 5.0410, 5.0420, 5.0410,
    5.0410, 5.0420, 5.0410, 5.0410, 5.0420, 5.0405,
};
const std::vector<double> kReferenceTmm{
    66.329, 64.618, 62.569, 61.597, 60.882, 60.151, 59.404, 58.639,
    57.857, 57.056, 56.234, 55.391, 54.526, 53.636, 52.720, 51.775,
    50.800, 49.792, 48.748, 47.663, 46.533, 45.354, 44.109, 42.818,
    41.380, 40.387, 39.479, 38.444, 38.444, 38.444,
};

const std::vector<double> kOptimizedD{
    12.000, 12.000, 12.000, 12.000, 12.000, 12.000, 12.000, 12.000,
    11.973, 11.960, 11.516, 11.497, 11.048, 11.039, 10.581, 10.563,
    10.104, 10.080, 9.608, 9.582, 9.093, 9.060, 8.563, 8.523,
    8.020, 7.980, 7.462, 7.452, 7.080, 7.080, 6.741,
};
const std::vector<double> kOptimizedH{
    3.1885, 5.0410, 5.0420, 5.0410, 4.0400, 5.0410, 5.0420, 5.0410,
    5.0410, 5.0420, 5.0410, 5.0410, 5.0420, 5.0410, 5.0410, 5.0420,
    5.0410, 5.0410, 5.0420, 5.0410, 5.0410, 5.0410, 5.0420, 5.0410,
    5.0410, 5.0420, 5.0410, 5.0410, 5.0420, 5.0405,
};
const std::vector<double> kOptimizedTmm{
    118.225, 113.191, 107.086, 101.219, 95.529, 89.934, 84.557, 79.579,
    74.789, 73.361, 71.914, 70.489, 69.020, 67.560, 66.073, 64.599,
    63.076, 61.535, 59.966, 58.392, 56.728, 55.083, 53.392, 51.695,
    50.080, 48.672, 47.376, 45.860, 44.524, 44.524,
};

TowerGeometry build(const std::vector<double>& d, const std::vector<double>& h,
                    const std::vector<double>& t_mm) {
  TowerGeometry g;
  g.d = d;
  g.h = h;
  for (double v : t_mm) g.t.push_back(v * 1e-3);
  g.validate();
  return g;
}

}  // namespace

TowerGeometry reference_geometry() { return build(kReferenceD, kReferenceH, kReferenceTmm); }

TowerGeometry optimized_geometry() { return build(kOptimizedD, kOptimizedH, kOptimizedTmm); }

}  // namespace fowt::tower
