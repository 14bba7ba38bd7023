#pragma once

#include <stdexcept>
#include <string>

namespace qnsk {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DtPolicy {
    enum class Kind { fixed, cfl } kind = Kind::cfl;
    double dt = 1e-3;       ///< step for fixed policy, upper bound for CFL policy
    double c_cfl = 0.4;
};

struct ParamSet {
    double nu = 0.0;
    double eps = 0.0;
    double r0 = 0.0;
    double r1 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double alpha = 8.0;
    int s = -1;  ///< hyperdiffusion order; -1 selects d + 1
    DtPolicy dt;
    /// Velocity-recovery floor; negative selects 1e-10 * mean(R0) when eta1 = 0.
    double R_min = -1.0;

    int order_s(int d) const { return s < 0 ? d + 1 : s; }
    /// Throws ConfigError when the parameter constraints fail for dimension d.
    void validate(int d) const;
};

}  // namespace qnsk
