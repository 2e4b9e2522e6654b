// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "convkoop/embedding.hpp"
#include "convkoop/koopman.hpp"
#include "convkoop/spectral_fast.hpp"
#include "convkoop/systems.hpp"

namespace convkoop {

// Every file starts with "# convkoop <kind> v1", then a column header line.
inline constexpr const char* kFormatVersion = "v1";

// 17 significant digits, C locale.
std::string format_double(double v);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
// Accepts the header above or a bare "t,..." header; dt and t0 come from the t column.
Trajectory read_trajectory_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const std::string& kind,
                      const std::vector<std::string>& columns, const Matrix& data);
Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* columns = nullptr);

void write_key_values(const std::string& path, const std::string& kind,
                      const std::vector<std::pair<std::string, std::string>>& kv);

// U.csv, sigma.csv, V.csv (when present) and basis_meta.csv in dir.
void write_svd_basis(const std::string& dir, const SvdBasis& basis);
void write_basis_spec(const std::string& dir, const BasisSpec& basis);
void write_coordinates(const std::string& path, const CoordinateSeries& w);
// operator.csv, eigenvalues.csv, spectrum.csv, amplitudes.csv, model_meta.csv.
void write_model(const std::string& dir, const KoopmanModel& model);
void write_autocovariance(const std::string& path, const Autocovariance& A);
void write_eigenfunctions(const std::string& path, const EigenfunctionSeries& e, double t0, double dt);

// Creates dir and its parents.
void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& file);

}  // namespace convkoop
