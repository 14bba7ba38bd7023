#include "qnsk/params.hpp"

namespace qnsk {

void ParamSet::validate(int d) const {
    auto nonneg = [](double x, const char* name) {
        if (!(x >= 0.0)) throw ConfigError(std::string(name) + " must be nonnegative");
    };
    auto unit = [](double x, const char* name) {
        if (!(x >= 0.0 && x < 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1)");
    };
    nonneg(nu, "nu");
    nonneg(eps, "eps");
    nonneg(r0, "r0");
    nonneg(r1, "r1");
    unit(delta1, "delta1");
    unit(delta2, "delta2");
    unit(eta1, "eta1");
    unit(eta2, "eta2");
    if (nu == 0.0 && eps == 0.0) throw ConfigError("(eps, nu) must not both vanish");
    if (eta1 > 0.0 && !(alpha > 4.0)) throw ConfigError("alpha must exceed 4 when eta1 > 0");
    if (eta2 > 0.0 && !(order_s(d) > d)) throw ConfigError("s must exceed d when eta2 > 0");
    if (!(dt.dt > 0.0)) throw ConfigError("dt must be positive");
    if (dt.kind == DtPolicy::Kind::cfl && !(dt.c_cfl > 0.0)) throw ConfigError("c_cfl must be positive");
}

}  // namespace qnsk
