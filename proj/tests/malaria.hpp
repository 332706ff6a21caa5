#pragma once

#include <array>

#include "wkappa/data_model.hpp"

// Malaria study counts and the reference 95% intervals.
namespace malaria {

inline const wkappa::PairedCounts kCounts{41, 0, 40, 8, 5, 1, 24, 181};

struct Pair {
  double lo, hi;
};

struct Row {
  double c;
  double kappa1, kappa2, delta, theta;
  Pair wald_diff, boot_diff, bayes_diff;
  Pair wald_ratio, log_ratio, fieller, boot_ratio, bayes_ratio;
};

inline const std::array<Row, 10> kRows{{
    {0.1, 0.726, 0.642, 0.084, 1.131, {-0.041, 0.208}, {-0.051, 0.200}, {-0.080, 0.219},
     {0.925, 1.335}, {0.943, 1.355}, {0.940, 1.357}, {0.926, 1.344}, {0.883, 1.393}},
    {0.1902, 0.659, 0.659, 0.0, 1.0, {-0.125, 0.125}, {-0.130, 0.124}, {-0.155, 0.136},
     {0.811, 1.189}, {0.828, 1.208}, {0.823, 1.206}, {0.817, 1.204}, {0.776, 1.234}},
    {0.2, 0.653, 0.661, -0.008, 0.988, {-0.133, 0.116}, {-0.137, 0.117}, {-0.162, 0.128},
     {0.800, 1.174}, {0.817, 1.194}, {0.812, 1.192}, {0.808, 1.192}, {0.766, 1.219}},
    {0.3, 0.593, 0.681, -0.088, 0.871, {-0.213, 0.037}, {-0.214, 0.039}, {-0.233, 0.051},
     {0.695, 1.046}, {0.711, 1.065}, {0.704, 1.059}, {0.701, 1.065}, {0.673, 1.083}},
    {0.4, 0.543, 0.701, -0.158, 0.775, {-0.283, -0.034}, {-0.284, -0.032}, {-0.298, -0.018},
     {0.609, 0.939}, {0.625, 0.958}, {0.615, 0.948}, {0.615, 0.952}, {0.593, 0.971}},
    {0.5, 0.501, 0.723, -0.222, 0.693, {-0.345, -0.100}, {-0.347, -0.100}, {-0.357, -0.081},
     {0.537, 0.847}, {0.553, 0.866}, {0.541, 0.854}, {0.541, 0.857}, {0.525, 0.877}},
    {0.6, 0.464, 0.747, -0.283, 0.621, {-0.402, -0.163}, {-0.402, -0.163}, {-0.411, -0.140},
     {0.476, 0.768}, {0.492, 0.786}, {0.479, 0.772}, {0.481, 0.776}, {0.468, 0.799}},
    {0.7, 0.433, 0.772, -0.339, 0.561, {-0.455, -0.223}, {-0.454, -0.222}, {-0.461, -0.195},
     {0.425, 0.698}, {0.440, 0.716}, {0.426, 0.701}, {0.430, 0.707}, {0.418, 0.727}},
    {0.8, 0.406, 0.799, -0.393, 0.508, {-0.506, -0.280}, {-0.504, -0.276}, {-0.511, -0.247},
     {0.380, 0.637}, {0.395, 0.654}, {0.381, 0.639}, {0.384, 0.644}, {0.375, 0.667}},
    {0.9, 0.382, 0.827, -0.445, 0.462, {-0.557, -0.333}, {-0.557, -0.329}, {-0.561, -0.296},
     {0.341, 0.582}, {0.356, 0.599}, {0.342, 0.584}, {0.347, 0.594}, {0.339, 0.611}},
}};

}  // namespace malaria
