#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctrec/covariance.hpp"
#include "ctrec/crosstemporal.hpp"
#include "ctrec/errors.hpp"

namespace ctrec {

struct NoiseSpec {
    double level = 100.0;             // starting mean of each hf bottom path
    double seasonal_amplitude = 10.0; // amplitude of the initial seasonal pattern
    double drift = 0.5;               // added every step of the seasonal random walk
    double volatility = 1.0;          // sd of the seasonal random walk innovations
    double observation_noise = 2.0;   // sd of the per-node noise on the series the forecasters see
};

struct SynthData {
    std::vector<MatrixXd> actuals;  // per cycle, n x (k*+m), exactly coherent
    std::vector<MatrixXd> observed; // actuals plus independent per-node noise
    MatrixXd hf_bottom;             // n_b x (cycles m)
};

SynthData generate_coherent(const CrossSectionalStructure &cs, const TemporalStructure &ts, Index cycles,
                            std::uint64_t seed, const NoiseSpec &noise = {});

enum class BaseScheme { SeasonalNaive, Mean };

BaseScheme parse_scheme(const std::string &s);

struct BaseForecasts {
    MatrixXd Y_hat; // n x h(k*+m)
    ResidualTableau residuals;
};

// Forecasts for cycles origin .. origin+h-1 from observed cycles 0 .. origin-1.
// Seasonal-naive repeats the last observed cycle, with residuals
// obs[t] - obs[t-1] (origin-1 columns); mean uses the training mean (origin columns).
BaseForecasts naive_base_forecasts(const SynthData &data, const TemporalStructure &ts, Index origin, Index h,
                                   BaseScheme scheme = BaseScheme::SeasonalNaive);

// Actual values for cycles origin .. origin+h-1 in the h-cycle tableau layout.
MatrixXd actual_tableau(const std::vector<MatrixXd> &cycles, const TemporalStructure &ts, Index origin, Index h);
MatrixXd actual_tableau(const SynthData &data, const TemporalStructure &ts, Index origin, Index h);

} // namespace ctrec
