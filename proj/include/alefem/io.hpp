#ifndef ALEFEM_IO_HPP
#define ALEFEM_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include <json.hpp>

#include "alefem/benchmarks.hpp"
#include "alefem/schemes.hpp"

namespace alefem::io
{

inline std::ofstream open_output(const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  out << std::setprecision(12);
  return out;
}

inline const char *run_csv_header()
{
  return "t,energy,area,volume,v_delta,sphericity,v_c,z_c,alpha_min,psi_e,picard_iters,"
         "solver_iters,remeshed";
}

/// Appends time-series rows to run.csv.
class RunCsv
{
public:
  explicit RunCsv(const std::filesystem::path &path) : out_(open_output(path))
  {
    out_ << run_csv_header() << '\n';
  }

  void write(const BenchmarkSample &b)
  {
    out_ << b.t << ',' << b.energy << ',' << b.area << ',' << b.volume << ',' << b.v_delta << ','
         << b.sphericity << ',' << b.V_c << ',' << b.z_c << ',' << b.alpha_min << ',' << b.psi_e
         << ',' << b.picard_iterations << ',' << b.solver_iterations << ','
         << (b.remeshed ? 1 : 0) << '\n';
  }
  void flush() { out_.flush(); }

private:
  std::ofstream out_;
};

inline nlohmann::json summary_json(const RunSummary &s)
{
  return {{"s_min", s.s_min},         {"t_at_s_min", s.t_at_s_min}, {"Vc_max", s.Vc_max},
          {"t_at_Vc_max", s.t_at_Vc_max}, {"zc_final", s.zc_final},   {"vDelta_final", s.vDelta_final}};
}

inline void write_summary(const std::filesystem::path &path, const RunSummary &s)
{
  auto out = open_output(path);
  out << summary_json(s).dump(2) << '\n';
}

inline void write_curve_csv(const std::filesystem::path &path, const GeneratingCurve &curve)
{
  auto out = open_output(path);
  out << "alpha,r,z\n";
  const double h = curve.h();
  for (std::size_t j = 0; j < curve.num_nodes(); ++j)
    out << j * h << ',' << curve.node(j).r << ',' << curve.node(j).z << '\n';
}

/// Legacy ASCII VTK: cell data phase and P0 pressure part, point data
/// velocity at vertices and P1 pressure part.
inline void write_mesh_vtk(const std::filesystem::path &path, const FittedMesh &mesh,
                           const VelocityField &U, const Eigen::VectorXd &P)
{
  auto out = open_output(path);
  const std::size_t K = mesh.num_vertices(), T = mesh.num_triangles();
  out << "# vtk DataFile Version 3.0\nalefem snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << K << " double\n";
  for (const Vec2 &p : mesh.vertices)
    out << p.r << ' ' << p.z << " 0\n";
  out << "CELLS " << T << ' ' << 4 * T << '\n';
  for (const auto &t : mesh.triangles)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << T << '\n';
  for (std::size_t t = 0; t < T; ++t)
    out << "5\n";
  out << "CELL_DATA " << T << "\nSCALARS phase int 1\nLOOKUP_TABLE default\n";
  for (std::size_t t = 0; t < T; ++t)
    out << (mesh.phase[t] == Phase::inner ? 0 : 1) << '\n';
  out << "SCALARS pressure_p0 double 1\nLOOKUP_TABLE default\n";
  for (std::size_t t = 0; t < T; ++t)
    out << (P.size() == static_cast<Eigen::Index>(K + T) ? P[K + t] : 0.0) << '\n';
  out << "POINT_DATA " << K << "\nVECTORS velocity double\n";
  for (std::size_t k = 0; k < K; ++k)
    out << U.coeffs[2 * k] << ' ' << U.coeffs[2 * k + 1] << " 0\n";
  out << "SCALARS pressure_p1 double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < K; ++k)
    out << (P.size() == static_cast<Eigen::Index>(K + T) ? P[k] : 0.0) << '\n';
}

inline std::string snapshot_name(const char *stem, int index, const char *ext)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06d.%s", stem, index, ext);
  return buf;
}

} // namespace alefem::io

#endif
