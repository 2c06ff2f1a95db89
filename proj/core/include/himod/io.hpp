// Copyright the himod authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HIMOD_IO_HPP
#define HIMOD_IO_HPP

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "himod/assembly.hpp"
#include "himod/scattering.hpp"

namespace himod
{

// One CSV data row: S(port_i/mode_i <- port_j/mode_j) at freq_hz.
struct CsvRow
{
  double freq_hz;
  int port_i;
  std::string mode_i;
  int port_j;
  std::string mode_j;
  std::complex<double> s;
};

// Header freq_hz,port_i,mode_i,port_j,mode_j,re,im,mag_db,phase_rad; rows are
// frequency-major, then row-major in S. Failed samples are skipped. Values are written
// with 17 significant digits. Throws IoError.
void write_csv(const ScatteringResult &result, const std::filesystem::path &path);
std::vector<CsvRow> read_csv(const std::filesystem::path &path);

// Touchstone v1 file with option line "# HZ S RI R 1". Two-port data is written in the
// S11 S21 S12 S22 order; larger matrices row by row, at most 4 pairs per line.
void write_touchstone(const ScatteringResult &result, const std::filesystem::path &path);

struct TouchstoneData
{
  std::size_t n_ports = 0;
  std::vector<double> frequencies;  // [Hz]
  std::vector<Eigen::MatrixXcd> S;
};

TouchstoneData read_touchstone(const std::filesystem::path &path);

// ".s<N>p" extension for a result with N ports.
std::string touchstone_extension(std::size_t n_ports);

struct ManifestInfo
{
  std::string config_echo;  // JSON text
  std::size_t n_dofs = 0;
  unsigned threads = 1;
  AssemblyStats assembly;
  double total_seconds = 0.0;
  std::vector<std::string> outputs;
};

void write_manifest(const ScatteringResult &result, const ManifestInfo &info,
                    const std::filesystem::path &path);

// Writes the nonzeros of a sparse matrix as "row col value" lines.
void write_triplets(const Eigen::SparseMatrix<double> &m, const std::filesystem::path &path);

}  // namespace himod

#endif  // HIMOD_IO_HPP
