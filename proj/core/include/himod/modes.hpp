// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_MODES_HPP
#define HIMOD_MODES_HPP

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace himod
{

enum class ModeKind
{
  TE,
  TM
};

struct ModeId
{
  ModeKind kind;
  int p;
  int q;

  friend bool operator==(const ModeId &, const ModeId &) = default;
};

// "TE10", "TM12", ...
std::string to_string(const ModeId &id);

// Parses "TE10", "TM12" or "TE1,12" (comma separates multi-digit indices). Throws
// ConfigError.
ModeId parse_mode_id(const std::string &text);

//
// One TE_pq or TM_pq mode of the PEC rectangular guide (0..a) x (0..b). Coordinates are
// corner based; the field expressions use the shifted arguments x~ = x - a, y~ = y - b,
// for which every sin(k_x x~) factor vanishes on the walls x = 0 and x = a.
//
struct Mode
{
  ModeKind kind;
  int p;
  int q;
  double a;   // guide width [m]
  double b;   // guide height [m]
  double kx;  // p pi / a [rad/m]
  double ky;  // q pi / b [rad/m]
  double kc;  // sqrt(kx^2 + ky^2), cutoff wavenumber [rad/m]
  double norm;  // sqrt(eps_p eps_q / (a b)) [1/m]

  ModeId id() const { return {kind, p, q}; }
};

// Builds a mode of the a x b guide. Throws ConfigError for TE00 or TM with p or q zero.
Mode make_mode(ModeKind kind, int p, int q, double a, double b);

struct AutoSelection
{
  std::size_t count;
};

using ModeSelection = std::variant<AutoSelection, std::vector<ModeId>>;

//
// Ordered modal basis of the reference a0 x b0 cross-section. TE modes come first, then
// TM modes; the TM modes carry the longitudinal unknowns.
//
struct ModeBasis
{
  double a0 = 0.0;
  double b0 = 0.0;
  std::vector<Mode> modes;
  std::size_t n_te = 0;
  std::size_t n_tm = 0;

  std::size_t size() const { return modes.size(); }
  std::span<const Mode> te_modes() const { return {modes.data(), n_te}; }
  std::span<const Mode> tm_modes() const { return {modes.data() + n_te, n_tm}; }
  int max_p() const;
  int max_q() const;
};

// Auto selection takes the N smallest cutoff wavenumbers; ties are broken TE before TM,
// then smaller q, then smaller p.
ModeBasis build_mode_table(double a0, double b0, const ModeSelection &selection);

struct TransverseField
{
  double ex;
  double ey;
};

// Longitudinal-curl data of a mode at one point.
//   curl_t_et = d(e_y)/dx - d(e_x)/dy  (z component of the transverse curl of e_t)
//   curl_gz   = (d(e_z)/dy, -d(e_z)/dx) (transverse curl of z e_z; TM only, else zero)
struct ModeCurls
{
  double curl_t_et;
  double curl_gz_x;
  double curl_gz_y;
};

// Transverse modal field e_t at corner coordinates 0 <= x <= a, 0 <= y <= b [1/m].
TransverseField eval_transverse(const Mode &m, double x, double y);

// Longitudinal modal field e_z of a TM mode [1/m]. Throws std::invalid_argument for TE.
double eval_longitudinal(const Mode &m, double x, double y);

ModeCurls eval_curls(const Mode &m, double x, double y);

// Cutoff frequency c k_c / (2 pi sqrt(eps_r mu_r)) [Hz].
double cutoff_frequency(const Mode &m, double eps_r = 1.0, double mu_r = 1.0);

}  // namespace himod

#endif  // HIMOD_MODES_HPP
