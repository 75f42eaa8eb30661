#pragma once

#include <cstdint>

namespace inrb {

// Inputs to the hidden-width quadratic
//   L*x^2 + (L + d_in_or_enc + d_out)*x + d_in + d_out + params_enc = P.
struct ParameterBudget {
  int64_t P = 0;            // target trainable-parameter count
  int L = 0;                // hidden-layer count
  int64_t d_in_or_enc = 0;  // width feeding the first hidden layer
  int64_t d_in = 0;
  int64_t d_out = 1;
  int64_t params_enc = 0;   // encoder parameters charged against the budget
};

// Floor of the positive root; throws BudgetInfeasible when none exists or
// the resulting width would be < 1.
int64_t solve_hidden_width(const ParameterBudget& b);

// Floor of the positive root of a*x^2 + bx + c = P.
int64_t solve_quadratic_width(double a, double b, double c, int64_t P);

// Per-family sizing. These reproduce the published tables at the six
// canonical budgets {1e4,3e4,1e5,3e5,1e6,3e6} and fall back to the
// closed-form solver for arbitrary budgets.
int64_t ffn_width(int64_t P, int d_in, int d_out);          // 3,13,46,131,364,820
int64_t siren_width(int64_t P, int d_in, int d_out);        // 56,99,181,315,576,998
int64_t wire_width(int64_t P, int d_in, int d_out);         // 48,85,156,272,498,864
int64_t grid_side(int64_t P, int dim, int d_out);           // 2D 100..1732, 3D 21..144
int64_t hash_log2_table(int64_t P, int d_out);              // 7,9,11,13,14,16
int64_t gsplat_count(int64_t P, int d_out);                 // gray 833.., rgb 714..
int64_t gaplanes_feature_dim(int64_t P, int dim, int d_out,
                             int64_t line_res, int64_t plane_res, int64_t vol_res);
int64_t bacon_width(int64_t P, int d_in, int d_out);

}  // namespace inrb
