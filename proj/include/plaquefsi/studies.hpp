#pragma once

#include "plaquefsi/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace plaquefsi {

/// One refinement level of a convergence study.
struct ConvergenceRow {
    int n = 0;          // cells per unit length
    double dt = 0.0;    // time step
    double error = 0.0;
    double eoc = 0.0;   // log2(previous error / error); 0 on the first row
};

struct ConvergenceStudy {
    std::string name;
    std::vector<ConvergenceRow> rows;

    [[nodiscard]] double mean_eoc() const;
    [[nodiscard]] double min_eoc() const;
};

/// Fill the EOC column of rows refined by a factor of two.
void compute_eoc(std::vector<ConvergenceRow>& rows);

/// Manufactured divergence-free flow on the fluid strip with no-slip wall and
/// interface traction; L2 velocity error at the final time. The amplitude is
/// linear in time in the spatial study (implicit Euler is exact in time) and
/// exponential in the temporal one.
ConvergenceStudy fluid_space_convergence(const std::vector<int>& ns, double rho = 1.0, double nu = 1.0);
ConvergenceStudy fluid_time_convergence(int n, const std::vector<double>& dts, double final_time, double rho = 1.0,
                                        double nu = 1.0);

/// Manufactured quasi-stationary solid problem with interface displacement
/// and outer traction; L2 displacement error.
ConvergenceStudy solid_space_convergence(const std::vector<int>& ns, double mu = 1.0);

/// Piola identity defect of a smooth displacement under refinement.
ConvergenceStudy piola_convergence(const std::vector<int>& ns);

/// Growth ODE with constant concentration against g0 exp(gamma beta c t / (d rho_s)).
struct GrowthOdeStudy {
    std::vector<double> dts;
    std::vector<double> values;       // g(T) at each dt
    std::vector<double> errors;       // raw implicit Euler errors
    double richardson = 0.0;          // two-level Richardson extrapolation
    double richardson_error = 0.0;
    double exact = 0.0;
};
GrowthOdeStudy growth_ode_study(const CellsParams& params, double c_bar, double g0, double final_time,
                                const std::vector<double>& dts);

/// Spectral bound of the clamped solid operator for several shear moduli.
struct EigenRow {
    double mu = 0.0;
    double omega_max = 0.0;
    double rayleigh_quotient = 0.0;
    int iterations = 0;
};
std::vector<EigenRow> eigen_study(int n, const std::vector<double>& mus, double L = 1.0, double Hs = 0.5);

/// Picard behaviour of the coupled problem over a family of scenarios.
struct SweepRow {
    double parameter = 0.0;  // T or the traction scale
    PicardStatus status = PicardStatus::Converged;
    int iterations = 0;
    double max_q = 0.0;
    double q1 = 0.0;         // first contraction ratio
    double final_norm = 0.0;
    double smallness = 0.0;
};
/// Runs `base` with each final time (steps follow from base.time.dt).
std::vector<SweepRow> t_sweep(const RunConfig& base, const std::vector<double>& final_times, std::ostream* log = nullptr);
/// Runs `base` with the initial traction multiplied by each scale.
std::vector<SweepRow> kappa_sweep(const RunConfig& base, const std::vector<double>& scales,
                                  std::ostream* log = nullptr);

/// True when the column is nondecreasing.
bool nondecreasing(const std::vector<double>& v);

// CSV writers (one header comment line per column).
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceStudy>& studies);
void write_growth_csv(std::ostream& os, const GrowthOdeStudy& s);
void write_eigen_csv(std::ostream& os, const std::vector<EigenRow>& rows);
void write_sweep_csv(std::ostream& os, const char* parameter, const std::vector<SweepRow>& rows);

}  // namespace plaquefsi
