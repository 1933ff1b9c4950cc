#pragma once

#include <string>
#include <vector>

#include "nvmpr/eigensolver.hpp"
#include "nvmpr/units.hpp"

namespace nvmpr {

// Sign of the electron Zeeman term as written for each Hamiltonian.
enum class ZeemanSign { Minus, Plus };

struct NvParams {
  double D = kTwoPi * 2.87e9;  // rad/s
  double E = 0.0;              // rad/s
  Vec3 axis = lattice::direction(1, 1, 1);
  // Fixes the local x axis, i.e. the orientation of the E term. Zero means automatic.
  Vec3 transverse_hint = Vec3::Zero();
  ZeemanSign sign_convention = ZeemanSign::Minus;

  void validate() const;
};

struct P1Params {
  double A_par = kTwoPi * 114.03e6;   // rad/s
  double A_perp = kTwoPi * 81.33e6;   // rad/s
  Vec3 axis = lattice::direction(1, 1, 1);
  Vec3 transverse_hint = Vec3::Zero();
  ZeemanSign sign_convention = ZeemanSign::Plus;

  void validate() const;
};

struct SpinHamiltonian {
  CMatrix matrix;                        // rad/s
  std::vector<std::string> basis_labels;  // one per row, local-frame m quantum numbers
};

struct Transition {
  double frequency = 0.0;  // rad/s
  std::string from_label;
  std::string to_label;
  int orientation_index = 0;
  bool ambiguous = false;  // state character or degeneracy made the assignment unreliable
};

struct TransitionSet {
  std::vector<Transition> entries;  // ascending frequency
};

// D Sz^2 + E (S+^2 + S-^2)/2 -/+ gamma_e B.S in the frame whose z is params.axis.
// Basis order m_S = +1, 0, -1.
SpinHamiltonian build_nv_hamiltonian(const NvParams& params, const Vec3& B,
                                     const PhysicalConstants& constants = {});

// +/- gamma_e B.S + A_perp (SxIx + SyIy) + A_par Sz Iz, S = 1/2, I = 1.
// Basis order (m_S, m_I) with m_S major: (+1/2,+1), (+1/2,0), ..., (-1/2,-1).
SpinHamiltonian build_p1_hamiltonian(const P1Params& params, const Vec3& B,
                                     const PhysicalConstants& constants = {});

EigenDecomposition diagonalize(const SpinHamiltonian& h);

// The two transitions out of the eigenstate with the largest m_S = 0 weight.
TransitionSet nv_transitions(const NvParams& params, const Vec3& B,
                             const PhysicalConstants& constants = {}, int orientation_index = 0);

// Same, for the four <111> orientations; entries carry the orientation index
// (0 = [111], then [-111], [1-11], [11-1]).
TransitionSet nv_orientation_transitions(double D, double E, const Vec3& B,
                                         const PhysicalConstants& constants = {});

// The three m_I-conserving ESR transitions, ordered by frequency. States are
// identified in the product basis with the electron quantized along B and the
// nucleus along the hyperfine field A.b. Low field or near-degenerate levels
// set `ambiguous`.
TransitionSet p1_transitions(const P1Params& params, const Vec3& B,
                             const PhysicalConstants& constants = {}, int orientation_index = 0);

// Satellite splitting from a transition set returned by p1_transitions,
// (f_high - f_low) / 2, in rad/s.
double p1_satellite_splitting(const TransitionSet& set);

}  // namespace nvmpr
