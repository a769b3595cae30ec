#pragma once

#include "didecomp/regression.hpp"
#include "didecomp/series.hpp"

#include <array>
#include <string>

namespace didecomp {

/// Regressor order of the external-conditions regression.
inline constexpr std::array<const char*, 4> kGlobalRegressors = {"DXY", "CRB", "VIX", "UST10"};

inline constexpr const char* kCdsGlobName = "CDS_glob";
inline constexpr const char* kCdsDomName = "CDS_dom";

struct CdsSplitModel {
    double alpha = 0.0;
    std::array<double, 4> gamma{};  ///< DXY, CRB, VIX, UST10
    OlsFit fit;
};

/// Global (fitted) and domestic (residual) parts of the CDS return, on the
/// inner-join dates of all five inputs. glob + dom reproduces cds.
struct CdsComponents {
    DailySeries glob;
    DailySeries dom;
};

/// Regresses CDS log-returns on already-transformed global regressors
/// (log-returns of DXY, CRB, VIX and the UST10 difference) with an intercept.
/// The intercept is part of the global component. Needs more than 5 joined rows.
std::pair<CdsSplitModel, CdsComponents> split_cds(const DailySeries& cds, const DailySeries& dxy,
                                                  const DailySeries& crb, const DailySeries& vix,
                                                  const DailySeries& ust10);

}  // namespace didecomp
